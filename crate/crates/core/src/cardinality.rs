//! "Exactly `b` of these variables are true" as CNF, via a balanced tree of
//! binary adders whose output bits are fixed to the binary digits of `b`.

use thiserror::Error;

use crate::cnf::Clause;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CardinalityError {
    #[error("bound {bound} exceeds the number of inputs {inputs}")]
    BoundOutOfRange { bound: usize, inputs: usize },
    #[error("first auxiliary index {fresh_from} does not exceed input index {max_input}")]
    FreshIndexTooSmall { fresh_from: usize, max_input: usize },
    #[error("input variable {0} is zero or repeated")]
    BadInput(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CardinalityEncoding {
    pub inputs: Vec<usize>,
    pub bound: usize,
    /// Auxiliary variables are `aux_start .. aux_start + aux_count`.
    pub aux_start: usize,
    pub aux_count: usize,
    pub clauses: Vec<Clause>,
}

impl CardinalityEncoding {
    /// One past the largest variable index used.
    pub fn next_free(&self) -> usize {
        self.aux_start + self.aux_count
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bit {
    Const(bool),
    Lit(i32),
}

impl std::ops::Not for Bit {
    type Output = Bit;
    fn not(self) -> Bit {
        match self {
            Bit::Const(b) => Bit::Const(!b),
            Bit::Lit(l) => Bit::Lit(-l),
        }
    }
}

struct Builder {
    next: usize,
    clauses: Vec<Clause>,
}

impl Builder {
    fn fresh(&mut self) -> i32 {
        let v = self.next as i32;
        self.next += 1;
        v
    }

    fn xor(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::Const(x), other) | (other, Bit::Const(x)) => {
                if x {
                    !other
                } else {
                    other
                }
            }
            (Bit::Lit(x), Bit::Lit(y)) if x == y => Bit::Const(false),
            (Bit::Lit(x), Bit::Lit(y)) if x == -y => Bit::Const(true),
            (Bit::Lit(x), Bit::Lit(y)) => {
                let z = self.fresh();
                self.clauses.extend([
                    vec![-z, x, y],
                    vec![-z, -x, -y],
                    vec![z, -x, y],
                    vec![z, x, -y],
                ]);
                Bit::Lit(z)
            }
        }
    }

    fn and(&mut self, a: Bit, b: Bit) -> Bit {
        match (a, b) {
            (Bit::Const(x), other) | (other, Bit::Const(x)) => {
                if x {
                    other
                } else {
                    Bit::Const(false)
                }
            }
            (Bit::Lit(x), Bit::Lit(y)) if x == y => a,
            (Bit::Lit(x), Bit::Lit(y)) if x == -y => Bit::Const(false),
            (Bit::Lit(x), Bit::Lit(y)) => {
                let z = self.fresh();
                self.clauses
                    .extend([vec![-z, x], vec![-z, y], vec![z, -x, -y]]);
                Bit::Lit(z)
            }
        }
    }

    fn or(&mut self, a: Bit, b: Bit) -> Bit {
        let n = self.and(!a, !b);
        !n
    }

    /// Returns `(sum, carry)` of three bits.
    fn full_add(&mut self, a: Bit, b: Bit, c: Bit) -> (Bit, Bit) {
        if let (Bit::Lit(x), Bit::Lit(y), Bit::Lit(z)) = (a, b, c) {
            let distinct = [x, y, z]
                .iter()
                .map(|l| l.abs())
                .collect::<std::collections::HashSet<_>>()
                .len()
                == 3;
            if distinct {
                let (s, k) = (self.fresh(), self.fresh());
                let ins = [x, y, z];
                for pattern in 0..8u32 {
                    // the clause excluding `pattern` with the wrong sum bit
                    let odd = pattern.count_ones() % 2 == 1;
                    let mut clause: Clause = (0..3)
                        .map(|i| {
                            if pattern >> i & 1 == 1 {
                                -ins[i]
                            } else {
                                ins[i]
                            }
                        })
                        .collect();
                    clause.push(if odd { s } else { -s });
                    self.clauses.push(clause);
                }
                self.clauses.extend([
                    vec![-x, -y, k],
                    vec![-x, -z, k],
                    vec![-y, -z, k],
                    vec![x, y, -k],
                    vec![x, z, -k],
                    vec![y, z, -k],
                ]);
                return (Bit::Lit(s), Bit::Lit(k));
            }
        }
        let t = self.xor(a, b);
        let sum = self.xor(t, c);
        let ab = self.and(a, b);
        let tc = self.and(t, c);
        let carry = self.or(ab, tc);
        (sum, carry)
    }

    /// Ripple-carry addition of two little-endian bit vectors.
    fn add(&mut self, x: &[Bit], y: &[Bit]) -> Vec<Bit> {
        let width = x.len().max(y.len());
        let mut out = Vec::with_capacity(width + 1);
        let mut carry = Bit::Const(false);
        for i in 0..width {
            let a = x.get(i).copied().unwrap_or(Bit::Const(false));
            let b = y.get(i).copied().unwrap_or(Bit::Const(false));
            let (s, c) = self.full_add(a, b, carry);
            out.push(s);
            carry = c;
        }
        out.push(carry);
        while out.last() == Some(&Bit::Const(false)) {
            out.pop();
        }
        out
    }

    fn sum(&mut self, inputs: &[Bit]) -> Vec<Bit> {
        match inputs {
            [] => Vec::new(),
            [single] => vec![*single],
            _ => {
                let (left, right) = inputs.split_at(inputs.len() / 2);
                let l = self.sum(left);
                let r = self.sum(right);
                self.add(&l, &r)
            }
        }
    }
}

/// Clauses over `vars` plus auxiliaries from `fresh_from` on whose models,
/// projected to `vars`, are exactly the assignments with `b` true variables.
pub fn encode_exactly(
    vars: &[usize],
    b: usize,
    fresh_from: usize,
) -> Result<CardinalityEncoding, CardinalityError> {
    if b > vars.len() {
        return Err(CardinalityError::BoundOutOfRange {
            bound: b,
            inputs: vars.len(),
        });
    }
    let mut sorted = vars.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(CardinalityError::BadInput(w[0]));
    }
    if sorted.first() == Some(&0) {
        return Err(CardinalityError::BadInput(0));
    }
    if let Some(&max_input) = sorted.last() {
        if fresh_from <= max_input {
            return Err(CardinalityError::FreshIndexTooSmall {
                fresh_from,
                max_input,
            });
        }
    }

    let mut builder = Builder {
        next: fresh_from,
        clauses: Vec::new(),
    };
    let leaves: Vec<Bit> = vars.iter().map(|&v| Bit::Lit(v as i32)).collect();
    let bits = builder.sum(&leaves);
    if b >> bits.len() != 0 {
        builder.clauses.push(Vec::new());
    }
    for (i, bit) in bits.iter().enumerate() {
        let want = b >> i & 1 == 1;
        match *bit {
            Bit::Const(c) if c != want => builder.clauses.push(Vec::new()),
            Bit::Const(_) => {}
            Bit::Lit(l) => builder.clauses.push(vec![if want { l } else { -l }]),
        }
    }
    Ok(CardinalityEncoding {
        inputs: vars.to_vec(),
        bound: b,
        aux_start: fresh_from,
        aux_count: builder.next - fresh_from,
        clauses: builder.clauses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::BoolClauseSet;
    use crate::satcore::{solve, Budget, Status};

    fn satisfiable_with_inputs(enc: &CardinalityEncoding, inputs: &[bool]) -> bool {
        let mut f = BoolClauseSet::with_clauses(enc.next_free() - 1, enc.clauses.clone());
        for (&v, &val) in enc.inputs.iter().zip(inputs) {
            f.push(vec![if val { v as i32 } else { -(v as i32) }]);
        }
        solve(&f, Budget::unlimited()).status == Status::Sat
    }

    #[test]
    fn single_variable() {
        let enc = encode_exactly(&[1], 1, 2).unwrap();
        assert_eq!(enc.clauses, vec![vec![1]]);
        assert_eq!(enc.aux_count, 0);
    }

    #[test]
    fn zero_bound_forces_all_false() {
        let enc = encode_exactly(&[1, 2, 3], 0, 4).unwrap();
        for bits in 0..8u32 {
            let a: Vec<bool> = (0..3).map(|i| bits >> i & 1 == 1).collect();
            assert_eq!(satisfiable_with_inputs(&enc, &a), bits == 0);
        }
    }

    #[test]
    fn six_choose_three() {
        let vars: Vec<usize> = (1..=6).collect();
        let enc = encode_exactly(&vars, 3, 7).unwrap();
        let models = (0..64u32)
            .filter(|bits| {
                let a: Vec<bool> = (0..6).map(|i| bits >> i & 1 == 1).collect();
                satisfiable_with_inputs(&enc, &a)
            })
            .count();
        assert_eq!(models, 20);
    }

    #[test]
    fn projection_equivalence_up_to_eight() {
        for n in 0..=8usize {
            let vars: Vec<usize> = (1..=n).collect();
            for b in 0..=n {
                let enc = encode_exactly(&vars, b, n + 1).unwrap();
                assert!(enc
                    .clauses
                    .iter()
                    .flatten()
                    .all(|&l| (l.unsigned_abs() as usize) < enc.next_free()));
                for bits in 0u32..1 << n {
                    let a: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
                    assert_eq!(
                        satisfiable_with_inputs(&enc, &a),
                        bits.count_ones() as usize == b,
                        "n={n} b={b} bits={bits:b}"
                    );
                }
            }
        }
    }

    #[test]
    fn non_contiguous_inputs() {
        let enc = encode_exactly(&[2, 5, 9], 2, 20).unwrap();
        assert!(enc.aux_start == 20);
        assert!(satisfiable_with_inputs(&enc, &[true, false, true]));
        assert!(!satisfiable_with_inputs(&enc, &[true, true, true]));
    }

    #[test]
    fn errors() {
        assert_eq!(
            encode_exactly(&[1, 2], 3, 3),
            Err(CardinalityError::BoundOutOfRange {
                bound: 3,
                inputs: 2
            })
        );
        assert_eq!(
            encode_exactly(&[1, 5], 1, 5),
            Err(CardinalityError::FreshIndexTooSmall {
                fresh_from: 5,
                max_input: 5
            })
        );
        assert_eq!(
            encode_exactly(&[2, 2], 1, 5),
            Err(CardinalityError::BadInput(2))
        );
        assert!(encode_exactly(&[], 0, 1).unwrap().clauses.is_empty());
    }
}
