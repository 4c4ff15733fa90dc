use super::irreducible::{minimal_invariant_subspace, SubspaceOutcome};
use super::rank::RowSpace;
use crate::multilinear::{Entry, FMat, Mat, QMat};
use crate::tuple::MatrixTuple;
use crate::{Error, Result};

/// Simultaneous block-upper-triangularization: a basis change `X` such
/// that every `X^{-1} A_i X` is block upper triangular with common block
/// dimensions, each diagonal block tuple irreducible (when certified).
#[derive(Debug, Clone)]
pub struct BlockTriangularization {
    pub basis_f: FMat,
    pub basis_q: Option<QMat>,
    pub dims: Vec<usize>,
    /// False when an Unknown verdict stopped the recursion early, so a
    /// diagonal block might still be reducible.
    pub certified: bool,
}

/// Extend the row basis `rows` to a full basis of R^d by standard basis
/// vectors, deterministically, and return the change-of-basis matrix with
/// the subspace vectors as the FIRST columns.
fn extend_to_basis<T: Entry>(rows: &[Vec<T>], d: usize) -> Mat<T> {
    let mut space: RowSpace<T> = RowSpace::new(d);
    let mut columns: Vec<Vec<T>> = Vec::new();
    for r in rows {
        if space.insert(r.clone()) {
            columns.push(r.clone());
        }
    }
    for i in 0..d {
        let mut e = vec![T::zero(); d];
        e[i] = T::one();
        if space.insert(e.clone()) {
            columns.push(e);
        }
    }
    assert_eq!(columns.len(), d, "could not extend to a basis");
    Mat::from_fn(d, |i, j| columns[j][i].clone())
}

struct Split<T> {
    basis: Mat<T>,
    dims: Vec<usize>,
    certified: bool,
}

fn triangularize_mats<T: super::irreducible::StructureEntry>(mats: &[Mat<T>]) -> Option<Split<T>> {
    let d = mats[0].dim();
    let analysis = minimal_invariant_subspace(mats);
    let rows = match analysis.outcome {
        SubspaceOutcome::Witness(rows) => rows,
        SubspaceOutcome::NoneCertified(_) => {
            return Some(Split {
                basis: Mat::identity(d),
                dims: vec![d],
                certified: true,
            })
        }
        // an irrational witness or an undecided case ends the recursion
        SubspaceOutcome::FloatWitness(..) | SubspaceOutcome::Inconclusive(_) => {
            return Some(Split {
                basis: Mat::identity(d),
                dims: vec![d],
                certified: false,
            })
        }
    };
    let m = rows.len();
    let x = extend_to_basis(&rows, d);
    let x_inv = x.inverse().ok()?;
    let conj: Vec<Mat<T>> = mats.iter().map(|a| x_inv.mul(a).mul(&x)).collect();
    // top-left m x m acts on the invariant subspace, bottom-right is the
    // quotient action
    let tops: Vec<Mat<T>> = conj
        .iter()
        .map(|a| Mat::from_fn(m, |i, j| a[(i, j)].clone()))
        .collect();
    let bottoms: Vec<Mat<T>> = conj
        .iter()
        .map(|a| Mat::from_fn(d - m, |i, j| a[(m + i, m + j)].clone()))
        .collect();
    let top_split = triangularize_mats(&tops)?;
    let bottom_split = triangularize_mats(&bottoms)?;
    // combined basis: X * blockdiag(X_top, X_bottom)
    let mut block = Mat::zero(d);
    for i in 0..m {
        for j in 0..m {
            block[(i, j)] = top_split.basis[(i, j)].clone();
        }
    }
    for i in 0..d - m {
        for j in 0..d - m {
            block[(m + i, m + j)] = bottom_split.basis[(i, j)].clone();
        }
    }
    let mut dims = top_split.dims;
    dims.extend(bottom_split.dims);
    Some(Split {
        basis: x.mul(&block),
        dims,
        certified: top_split.certified && bottom_split.certified,
    })
}

/// Simultaneously block-upper-triangularize a tuple. Returns `None` when
/// the tuple is irreducible (no decomposition exists).
pub fn block_triangularize(tuple: &MatrixTuple) -> Result<Option<BlockTriangularization>> {
    match tuple.exact_mats() {
        Some(mats) => {
            let split = triangularize_mats(mats)
                .ok_or_else(|| Error::Numeric("basis extension failed".into()))?;
            if split.dims.len() == 1 {
                return Ok(None);
            }
            let basis_f = split.basis.to_float();
            Ok(Some(BlockTriangularization {
                basis_f,
                basis_q: Some(split.basis),
                dims: split.dims,
                certified: split.certified,
            }))
        }
        None => {
            let split = triangularize_mats(tuple.float_mats())
                .ok_or_else(|| Error::Numeric("basis extension failed".into()))?;
            if split.dims.len() == 1 {
                return Ok(None);
            }
            Ok(Some(BlockTriangularization {
                basis_f: split.basis,
                basis_q: None,
                dims: split.dims,
                certified: split.certified,
            }))
        }
    }
}

impl BlockTriangularization {
    /// Conjugate the tuple into the triangularizing basis.
    pub fn conjugated(&self, tuple: &MatrixTuple) -> Result<MatrixTuple> {
        match (&self.basis_q, tuple.exact_mats()) {
            (Some(x), Some(mats)) => {
                let x_inv = x.inverse()?;
                let conj: Vec<QMat> = mats.iter().map(|a| x_inv.mul(a).mul(x)).collect();
                MatrixTuple::from_rational(conj, tuple.labels().map(|l| l.to_vec()))
            }
            _ => {
                let x = &self.basis_f;
                let x_inv = x.inverse()?;
                let conj: Vec<FMat> = tuple
                    .float_mats()
                    .iter()
                    .map(|a| x_inv.mul(a).mul(x))
                    .collect();
                MatrixTuple::from_float(conj, tuple.labels().map(|l| l.to_vec()))
            }
        }
    }

    /// Verify the conjugated tuple really is block upper triangular and
    /// return the maximum magnitude found below the block diagonal.
    pub fn residual(&self, tuple: &MatrixTuple) -> Result<f64> {
        let conj = self.conjugated(tuple)?;
        let mut worst = 0.0_f64;
        for m in conj.float_mats() {
            let mut row_start = 0usize;
            for &db in &self.dims {
                for i in row_start..row_start + db {
                    for j in 0..row_start {
                        worst = worst.max(m[(i, j)].abs());
                    }
                }
                row_start += db;
            }
        }
        Ok(worst)
    }
}

/// Zero the off-diagonal blocks of a block-upper-triangular tuple (in the
/// triangularizing basis), keeping the diagonal blocks: by the equilibrium
/// transfer theorem the equilibrium states are unchanged.
pub fn block_diagonal_tuple(
    tuple: &MatrixTuple,
    tri: &BlockTriangularization,
) -> Result<MatrixTuple> {
    let conj = tri.conjugated(tuple)?;
    let zero_blocks_f = |m: &FMat| -> FMat {
        let mut out = FMat::zero(m.dim());
        let mut start = 0usize;
        for &db in &tri.dims {
            for i in start..start + db {
                for j in start..start + db {
                    out[(i, j)] = m[(i, j)];
                }
            }
            start += db;
        }
        out
    };
    match conj.exact_mats() {
        Some(mats) => {
            let cleaned: Vec<QMat> = mats
                .iter()
                .map(|m| {
                    let mut out = QMat::zero(m.dim());
                    let mut start = 0usize;
                    for &db in &tri.dims {
                        for i in start..start + db {
                            for j in start..start + db {
                                out[(i, j)] = m[(i, j)].clone();
                            }
                        }
                        start += db;
                    }
                    out
                })
                .collect();
            MatrixTuple::from_rational(cleaned, None)
        }
        None => {
            let cleaned: Vec<FMat> = conj.float_mats().iter().map(zero_blocks_f).collect();
            MatrixTuple::from_float(cleaned, None)
        }
    }
}
