use crate::multilinear::{Entry, Mat};

/// Incrementally maintained row space in echelon form. Supports rank
/// queries, membership tests, and kernel extraction, generically over
/// exact rationals and floats (the `Entry` pivot test encapsulates the
/// difference).
#[derive(Debug, Clone)]
pub struct RowSpace<T> {
    cols: usize,
    rows: Vec<Vec<T>>,
    pivots: Vec<usize>,
    scale: T,
}

impl<T: Entry> RowSpace<T> {
    pub fn new(cols: usize) -> Self {
        RowSpace {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
            scale: T::zero(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    fn note_scale(&mut self, v: &[T]) {
        for x in v {
            if x.abs_cmp(&self.scale) == std::cmp::Ordering::Greater {
                self.scale = x.clone();
            }
        }
    }

    /// Residual of `v` after reduction against the span.
    pub fn residual(&self, v: &[T]) -> Vec<T> {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w
    }

    /// Reduce `v` against the current rows in place.
    fn reduce(&self, v: &mut [T]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let factor = v[p].clone() / row[p].clone();
            for c in 0..self.cols {
                let delta = factor.clone() * row[c].clone();
                v[c] = v[c].clone() - delta;
            }
        }
    }

    /// Insert a vector; returns true when the rank grew.
    pub fn insert(&mut self, mut v: Vec<T>) -> bool {
        assert_eq!(v.len(), self.cols);
        self.note_scale(&v);
        self.reduce(&mut v);
        let pivot = (0..self.cols)
            .filter(|&c| !v[c].is_negligible(&self.scale))
            .max_by(|&a, &b| v[a].abs_cmp(&v[b]));
        let Some(pivot) = pivot else { return false };
        // eliminate the new pivot column from existing rows to stay close
        // to reduced echelon form
        for r in 0..self.rows.len() {
            if self.rows[r][pivot].is_zero() {
                continue;
            }
            let factor = self.rows[r][pivot].clone() / v[pivot].clone();
            for c in 0..self.cols {
                let delta = factor.clone() * v[c].clone();
                self.rows[r][c] = self.rows[r][c].clone() - delta;
            }
        }
        self.rows.push(v);
        self.pivots.push(pivot);
        true
    }

    /// Membership test: does `v` lie in the span?
    pub fn contains(&self, v: &[T]) -> bool {
        let mut scale = self.scale.clone();
        for x in v {
            if x.abs_cmp(&scale) == std::cmp::Ordering::Greater {
                scale = x.clone();
            }
        }
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| x.is_negligible(&scale))
    }
}

/// Kernel basis of a square matrix (partial pivoting; exact on rationals,
/// tolerance-based on floats).
pub fn kernel<T: Entry>(m: &Mat<T>) -> Vec<Vec<T>> {
    let d = m.dim();
    let rows: Vec<Vec<T>> = (0..d).map(|i| m.row(i).to_vec()).collect();
    kernel_of_rows(&rows, d)
}

/// Kernel basis of a rectangular row system: `{x : rows * x = 0}`.
pub fn kernel_of_rows<T: Entry>(rows: &[Vec<T>], cols: usize) -> Vec<Vec<T>> {
    let nrows = rows.len();
    let mut a: Vec<Vec<T>> = rows.to_vec();
    let mut scale = T::zero();
    for row in &a {
        for x in row {
            if x.abs_cmp(&scale) == std::cmp::Ordering::Greater {
                scale = x.clone();
            }
        }
    }
    let mut pivot_cols = Vec::new();
    let mut row = 0usize;
    for col in 0..cols {
        if row >= nrows {
            break;
        }
        let best = (row..nrows).max_by(|&x, &y| a[x][col].abs_cmp(&a[y][col]));
        let Some(best) = best else { break };
        if a[best][col].is_negligible(&scale) {
            continue;
        }
        a.swap(best, row);
        let pivot = a[row][col].clone();
        for c in 0..cols {
            a[row][c] = a[row][c].clone() / pivot.clone();
        }
        for r in 0..nrows {
            if r == row {
                continue;
            }
            let factor = a[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for c in 0..cols {
                let delta = factor.clone() * a[row][c].clone();
                a[r][c] = a[r][c].clone() - delta;
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::with_capacity(free_cols.len());
    for &fc in &free_cols {
        let mut v = vec![T::zero(); cols];
        v[fc] = T::one();
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = T::zero() - a[r][fc].clone();
        }
        basis.push(v);
    }
    basis
}
