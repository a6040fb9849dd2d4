//! Small dense matrices over GF(2^{L-1}), crate-internal.
//!
//! Used for the Vandermonde diagonalization check, frontier-rank tests during
//! code construction and solving for scalar decoding matrices. All shapes here
//! are tiny (at most |E| x |E|), so clarity beats packing.

use crate::field::{FieldCtx, FieldElement};

#[derive(Clone, PartialEq, Eq)]
pub(crate) struct FieldMat {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl FieldMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        FieldMat { rows, cols, data: vec![FieldElement::zero(); rows * cols] }
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                FieldElement::one()
            } else {
                FieldElement::zero()
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> FieldElement) -> Self {
        let mut m = FieldMat::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                *m.get_mut(i, j) = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &FieldElement {
        &self.data[r * self.cols + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut FieldElement {
        &mut self.data[r * self.cols + c]
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.get(i, j) == &FieldElement::one()
                    } else {
                        self.get(i, j).is_zero()
                    }
                })
            })
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn add(&self, ctx: &FieldCtx, other: &FieldMat) -> FieldMat {
        assert!(self.rows == other.rows && self.cols == other.cols);
        Self::from_fn(self.rows, self.cols, |i, j| ctx.add(self.get(i, j), other.get(i, j)))
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &FieldMat) -> FieldMat {
        assert_eq!(self.cols, other.rows, "field matrix shape mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = FieldElement::zero();
            for k in 0..self.cols {
                acc = ctx.add(&acc, &ctx.mul(self.get(i, k), other.get(k, j)));
            }
            acc
        })
    }

    pub fn rank(&self, ctx: &FieldCtx) -> usize {
        self.clone().reduce(ctx, self.cols).len()
    }

    /// Gauss–Jordan reduction in place, pivoting only within the first
    /// `pivot_cols` columns; returns (pivot row, pivot col) pairs.
    fn reduce(&mut self, ctx: &FieldCtx, pivot_cols: usize) -> Vec<(usize, usize)> {
        let mut pivots = Vec::new();
        let mut pr = 0;
        for col in 0..pivot_cols {
            if pr == self.rows {
                break;
            }
            let Some(r) = (pr..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            for c in 0..self.cols {
                let tmp = self.get(r, c).clone();
                *self.get_mut(r, c) = self.get(pr, c).clone();
                *self.get_mut(pr, c) = tmp;
            }
            let inv = ctx.inv(self.get(pr, col)).expect("pivot is nonzero");
            for c in 0..self.cols {
                *self.get_mut(pr, c) = ctx.mul(self.get(pr, c), &inv);
            }
            for other in 0..self.rows {
                if other != pr && !self.get(other, col).is_zero() {
                    let factor = self.get(other, col).clone();
                    for c in 0..self.cols {
                        let sub = ctx.mul(&factor, self.get(pr, c));
                        *self.get_mut(other, c) = ctx.add(self.get(other, c), &sub);
                    }
                }
            }
            pivots.push((pr, col));
            pr += 1;
        }
        pivots
    }

    /// Solves self · X = target with free variables zeroed; `None` when
    /// inconsistent.
    pub fn solve_right(&self, ctx: &FieldCtx, target: &FieldMat) -> Option<FieldMat> {
        assert_eq!(self.rows, target.rows, "row mismatch in solve_right");
        let mut aug = FieldMat::from_fn(self.rows, self.cols + target.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                target.get(i, j - self.cols).clone()
            }
        });
        let pivots = aug.reduce(ctx, self.cols);
        let rank = pivots.len();
        for r in rank..self.rows {
            for j in 0..target.cols {
                if !aug.get(r, self.cols + j).is_zero() {
                    return None;
                }
            }
        }
        let mut x = FieldMat::zero(self.cols, target.cols);
        for &(r, c) in &pivots {
            for j in 0..target.cols {
                *x.get_mut(c, j) = aug.get(r, self.cols + j).clone();
            }
        }
        Some(x)
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn invert(&self, ctx: &FieldCtx) -> Option<FieldMat> {
        assert_eq!(self.rows, self.cols);
        if self.rank(ctx) < self.rows {
            return None;
        }
        self.solve_right(ctx, &FieldMat::identity(self.rows))
    }
}

impl std::fmt::Debug for FieldMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "FieldMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:?}", self.get(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}
