use super::rank::{kernel, kernel_of_rows, RowSpace};
use super::{StructureReport, Verdict, Witness};
use crate::multilinear::{Entry, FMat, Mat, QMat};
use crate::scalar::{rational_to_f64, Rational};
use crate::tuple::{Backend, MatrixTuple};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Spanning set of the word-product span `span{A_i : i in Sigma_*}`
/// (a multiplicatively closed subspace of d x d matrices), computed by
/// seed-and-saturate: start from the identity and left-multiply by
/// generators until the rank stabilizes.
pub struct AlgebraClosure<T> {
    pub elements: Vec<Mat<T>>,
    pub rank: usize,
}

pub(crate) fn closure<T: Entry>(mats: &[Mat<T>]) -> AlgebraClosure<T> {
    let d = mats[0].dim();
    let mut space: RowSpace<T> = RowSpace::new(d * d);
    let mut elements: Vec<Mat<T>> = Vec::new();
    let mut queue: Vec<Mat<T>> = vec![Mat::identity(d)];
    while let Some(m) = queue.pop() {
        if !space.insert(flatten(&m)) {
            continue;
        }
        for a in mats {
            queue.push(a.mul(&m));
        }
        elements.push(m);
        if space.rank() == d * d {
            break;
        }
    }
    let rank = space.rank();
    AlgebraClosure { elements, rank }
}

fn flatten<T: Entry>(m: &Mat<T>) -> Vec<T> {
    let d = m.dim();
    let mut v = Vec::with_capacity(d * d);
    for i in 0..d {
        v.extend_from_slice(m.row(i));
    }
    v
}

/// Public closure entry point; reports the rank of the generated span on
/// the tuple's own backend.
pub fn algebra_closure(tuple: &MatrixTuple) -> AlgebraClosure<f64> {
    match tuple.exact_mats() {
        Some(mats) => {
            let c = closure(mats);
            AlgebraClosure {
                elements: c.elements.iter().map(|m| m.to_float()).collect(),
                rank: c.rank,
            }
        }
        None => closure(tuple.float_mats()),
    }
}

// ---------------------------------------------------------------------
// backend hooks

/// Result of enumerating the real eigenspaces of one matrix that are
/// representable on the backend.
pub(crate) struct EigenSpaces<T> {
    /// Bases of eigenspaces for distinct representable real eigenvalues.
    pub spaces: Vec<Vec<Vec<T>>>,
    /// True when every real eigenvalue is covered by `spaces`.
    pub complete: bool,
}

pub(crate) trait StructureEntry: Entry + Sized {
    fn from_i64(v: i64) -> Self;
    fn eigen_spaces(m: &Mat<Self>) -> EigenSpaces<Self>;
    /// Decisive common-eigenline test for a commuting 2x2 tuple whose
    /// pivot matrix has irrational real eigenvalues. `None` means the
    /// backend has no such refinement.
    fn quadratic_eigenline(mats: &[Mat<Self>], pivot: &Mat<Self>) -> Option<QuadDecision>;
}

pub(crate) enum QuadDecision {
    Found(Vec<f64>),
    NoneCertified,
}

impl StructureEntry for f64 {
    fn from_i64(v: i64) -> f64 {
        v as f64
    }

    fn eigen_spaces(m: &FMat) -> EigenSpaces<f64> {
        let d = m.dim();
        let scale = m.max_abs().max(1.0);
        let roots = match float_eigenvalues(m) {
            Ok(r) => r,
            Err(_) => {
                return EigenSpaces {
                    spaces: vec![],
                    complete: false,
                }
            }
        };
        let mut reals: Vec<f64> = roots
            .iter()
            .filter(|z| z.im.abs() <= 1e-7 * scale)
            .map(|z| z.re)
            .collect();
        reals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        reals.dedup_by(|a, b| (*a - *b).abs() <= 1e-7 * scale);
        let mut spaces = Vec::new();
        for lambda in reals {
            let mut shifted = m.clone();
            for i in 0..d {
                shifted[(i, i)] -= lambda;
            }
            let k = kernel(&shifted);
            if !k.is_empty() && k.len() < d {
                spaces.push(k);
            }
        }
        EigenSpaces {
            spaces,
            complete: true,
        }
    }

    fn quadratic_eigenline(_mats: &[FMat], _pivot: &FMat) -> Option<QuadDecision> {
        None
    }
}

fn float_eigenvalues(m: &FMat) -> Result<Vec<Complex64>> {
    crate::multilinear::eigenvalues(m)
}

impl StructureEntry for Rational {
    fn from_i64(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    fn eigen_spaces(m: &QMat) -> EigenSpaces<Rational> {
        let d = m.dim();
        let mut poly = char_poly_exact(m);
        // rational roots, reconstructed from float approximations and
        // verified exactly before use
        let mut roots: Vec<Rational> = Vec::new();
        if let Ok(candidates) = float_eigenvalues(&m.to_float()) {
            let scale = m.to_float().max_abs().max(1.0);
            let mut tried: Vec<Rational> = Vec::new();
            for z in candidates {
                if z.im.abs() > 1e-7 * scale {
                    continue;
                }
                for cand in rational_candidates(z.re) {
                    if tried.contains(&cand) {
                        continue;
                    }
                    tried.push(cand.clone());
                    while poly.len() > 1 && eval_poly(&poly, &cand).is_zero() {
                        poly = deflate(&poly, &cand);
                        if !roots.contains(&cand) {
                            roots.push(cand.clone());
                        }
                    }
                }
            }
        }
        // leftover factor analysis
        let leftover_degree = poly.len() - 1;
        let complete = match leftover_degree {
            0 => true,
            2 => {
                // monic x^2 + b x + c: real roots iff disc >= 0; rational
                // iff disc is a rational square (any such root would have
                // been reconstructed, so a square here means a missed
                // root -- extract it to stay sound)
                let b = poly[1].clone();
                let c = poly[2].clone();
                let disc = b.clone() * b.clone() - Rational::from_integer(4.into()) * c;
                if disc.is_negative() {
                    true
                } else if let Some(sq) = rational_sqrt(&disc) {
                    let half = Rational::new(1.into(), 2.into());
                    for r in [
                        ((-b.clone()) + sq.clone()) * half.clone(),
                        ((-b) - sq) * half,
                    ] {
                        if !roots.contains(&r) {
                            roots.push(r);
                        }
                    }
                    true
                } else {
                    false
                }
            }
            _ => false,
        };
        let mut spaces = Vec::new();
        for lambda in roots {
            let mut shifted = m.clone();
            for i in 0..d {
                shifted[(i, i)] = shifted[(i, i)].clone() - lambda.clone();
            }
            let k = kernel(&shifted);
            if !k.is_empty() && k.len() < d {
                spaces.push(k);
            }
        }
        EigenSpaces { spaces, complete }
    }

    fn quadratic_eigenline(mats: &[QMat], pivot: &QMat) -> Option<QuadDecision> {
        if pivot.dim() != 2 {
            return None;
        }
        let a = pivot[(0, 0)].clone();
        let b = pivot[(0, 1)].clone();
        let c = pivot[(1, 0)].clone();
        let dd = pivot[(1, 1)].clone();
        let tr = a.clone() + dd.clone();
        let det = pivot.det();
        let disc = tr.clone() * tr.clone() - Rational::from_integer(4.into()) * det;
        if !disc.is_positive() || rational_sqrt(&disc).is_some() {
            return None; // not the irrational-real case
        }
        // lambda = (tr + sqrt(disc)) / 2; eigenvector in Q(sqrt(disc))
        let half = Rational::new(1.into(), 2.into());
        let lam = QuadExt {
            p: tr * half.clone(),
            q: half,
        };
        let (v1, v2) = if !b.is_zero() {
            (QuadExt::rational(b), lam - QuadExt::rational(a))
        } else if !c.is_zero() {
            (lam - QuadExt::rational(dd), QuadExt::rational(c))
        } else {
            return None; // diagonal: rational eigenvalues, handled earlier
        };
        for m in mats {
            // cross product of (M v) with v must vanish in Q(sqrt(disc))
            let w1 = scale_ext(&m[(0, 0)], &v1) + scale_ext(&m[(0, 1)], &v2);
            let w2 = scale_ext(&m[(1, 0)], &v1) + scale_ext(&m[(1, 1)], &v2);
            let cross = mul_with_d(&w1, &v2, &disc) - mul_with_d(&w2, &v1, &disc);
            if !(cross.p.is_zero() && cross.q.is_zero()) {
                return Some(QuadDecision::NoneCertified);
            }
        }
        let root = rational_to_f64(&disc).sqrt();
        let v = vec![
            rational_to_f64(&v1.p) + rational_to_f64(&v1.q) * root,
            rational_to_f64(&v2.p) + rational_to_f64(&v2.q) * root,
        ];
        Some(QuadDecision::Found(v))
    }
}

/// Element of the quadratic extension Q(sqrt(D)): `p + q sqrt(D)`.
/// D is carried implicitly by the computation that builds the values.
#[derive(Debug, Clone)]
struct QuadExt {
    p: Rational,
    q: Rational,
}

impl QuadExt {
    fn rational(p: Rational) -> Self {
        QuadExt {
            p,
            q: Rational::zero(),
        }
    }
}

impl std::ops::Sub for QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: QuadExt) -> QuadExt {
        QuadExt {
            p: self.p - rhs.p,
            q: self.q - rhs.q,
        }
    }
}

impl std::ops::Add for QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: QuadExt) -> QuadExt {
        QuadExt {
            p: self.p + rhs.p,
            q: self.q + rhs.q,
        }
    }
}

fn scale_ext(c: &Rational, v: &QuadExt) -> QuadExt {
    QuadExt {
        p: c.clone() * v.p.clone(),
        q: c.clone() * v.q.clone(),
    }
}

fn char_poly_exact(m: &QMat) -> Vec<Rational> {
    let d = m.dim();
    let mut coeffs = vec![Rational::one()];
    let mut mk = QMat::identity(d);
    for k in 1..=d {
        mk = m.mul(&mk);
        let mut trace = Rational::zero();
        for i in 0..d {
            trace += mk[(i, i)].clone();
        }
        let c = -trace / Rational::from_integer(BigInt::from(k));
        coeffs.push(c.clone());
        for i in 0..d {
            mk[(i, i)] = mk[(i, i)].clone() + c.clone();
        }
    }
    coeffs
}

fn eval_poly(poly: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in poly {
        acc = acc * x.clone() + c.clone();
    }
    acc
}

fn deflate(poly: &[Rational], root: &Rational) -> Vec<Rational> {
    let mut out = Vec::with_capacity(poly.len() - 1);
    let mut acc = Rational::zero();
    for c in &poly[..poly.len() - 1] {
        acc = acc * root.clone() + c.clone();
        out.push(acc.clone());
    }
    out
}

/// Rational candidates for a float value: continued-fraction convergents
/// with bounded denominators, plus the nearest integer.
fn rational_candidates(x: f64) -> Vec<Rational> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    let rounded = x.round();
    if rounded.abs() < 1e15 {
        out.push(Rational::from_integer(BigInt::from(rounded as i64)));
    }
    if x.abs() >= 1e12 {
        // numerators of the convergents would overflow; the integer
        // candidate above is the only safe guess at this magnitude
        return out;
    }
    let (mut p0, mut q0): (i128, i128) = (1, 0);
    let (mut p1, mut q1): (i128, i128) = (x.floor() as i128, 1);
    let mut frac = x - x.floor();
    for _ in 0..40 {
        let approx = p1 as f64 / q1 as f64;
        if (approx - x).abs() <= 1e-11 * x.abs().max(1.0) {
            out.push(Rational::new(BigInt::from(p1), BigInt::from(q1)));
            break;
        }
        if frac.abs() < 1e-14 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        if a >= 1e12 || q1 >= 1_000_000_000_000 || p1.abs() >= (1i128 << 100) {
            break;
        }
        let a_i = a as i128;
        let (Some(p2), Some(q2)) = (
            a_i.checked_mul(p1).and_then(|v| v.checked_add(p0)),
            a_i.checked_mul(q1).and_then(|v| v.checked_add(q0)),
        ) else {
            break;
        };
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        frac = inv - a;
    }
    out
}

/// Exact square root of a nonnegative rational, when it is a square.
fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

fn mul_with_d(a: &QuadExt, b: &QuadExt, d: &Rational) -> QuadExt {
    QuadExt {
        p: a.p.clone() * b.p.clone() + d.clone() * a.q.clone() * b.q.clone(),
        q: a.p.clone() * b.q.clone() + a.q.clone() * b.p.clone(),
    }
}

// ---------------------------------------------------------------------
// the analysis proper

pub(crate) enum SubspaceOutcome<T> {
    /// A verified proper nontrivial invariant subspace (row basis).
    Witness(Vec<Vec<T>>),
    /// Certified: no proper nontrivial invariant subspace exists.
    NoneCertified(String),
    /// Could not decide.
    Inconclusive(String),
    /// Reducible over the reals, but the witness is irrational; carried
    /// as floats. Only produced on the exact backend.
    FloatWitness(Vec<Vec<f64>>, String),
}

fn is_scalar<T: Entry>(m: &Mat<T>, scale: &T) -> bool {
    let d = m.dim();
    for i in 0..d {
        for j in 0..d {
            if i != j && !m[(i, j)].is_negligible(scale) {
                return false;
            }
        }
        let diff = m[(i, i)].clone() - m[(0, 0)].clone();
        if !diff.is_negligible(scale) {
            return false;
        }
    }
    true
}

fn max_entry_scale<T: Entry>(mats: &[Mat<T>]) -> T {
    let mut scale = T::zero();
    for m in mats {
        for i in 0..m.dim() {
            for x in m.row(i) {
                if x.abs_cmp(&scale) == std::cmp::Ordering::Greater {
                    scale = x.clone();
                }
            }
        }
    }
    scale
}

fn commutator<T: Entry>(a: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    a.mul(b).sub(&b.mul(a))
}

fn verify_invariant<T: Entry>(mats: &[Mat<T>], basis: &[Vec<T>]) -> bool {
    let mut space: RowSpace<T> = RowSpace::new(basis[0].len());
    for row in basis {
        space.insert(row.clone());
    }
    for m in mats {
        for row in basis {
            if !space.contains(&m.apply(row)) {
                return false;
            }
        }
    }
    true
}

/// Largest subspace of `span(start)` invariant under every matrix,
/// computed by iterating `K <- {v in K : A_i v in K for all i}`.
fn largest_invariant_inside<T: Entry>(mats: &[Mat<T>], start: &[Vec<T>]) -> Vec<Vec<T>> {
    let d = mats[0].dim();
    let mut basis: Vec<Vec<T>> = start.to_vec();
    loop {
        if basis.is_empty() {
            return basis;
        }
        let mut space: RowSpace<T> = RowSpace::new(d);
        for row in &basis {
            space.insert(row.clone());
        }
        // constraint rows: residual of A_i * (basis combination) against
        // the span, as linear maps in the combination coefficients
        let m = basis.len();
        let mut constraint_rows: Vec<Vec<T>> = Vec::new();
        for a in mats {
            // residual vectors of each basis image
            let residuals: Vec<Vec<T>> =
                basis.iter().map(|v| space.residual(&a.apply(v))).collect();
            for coord in 0..d {
                let row: Vec<T> = (0..m).map(|j| residuals[j][coord].clone()).collect();
                if row.iter().all(|x| x.is_zero()) {
                    continue;
                }
                constraint_rows.push(row);
            }
        }
        if constraint_rows.is_empty() {
            return basis; // already invariant
        }
        let null = kernel_of_rows(&constraint_rows, m);
        if null.len() == basis.len() {
            return basis;
        }
        let mut next: Vec<Vec<T>> = Vec::new();
        for x in null {
            let mut v = vec![T::zero(); d];
            for (j, coef) in x.iter().enumerate() {
                for c in 0..d {
                    v[c] = v[c].clone() + coef.clone() * basis[j][c].clone();
                }
            }
            next.push(v);
        }
        // keep an independent subset
        let mut cleaned: Vec<Vec<T>> = Vec::new();
        let mut rs: RowSpace<T> = RowSpace::new(d);
        for v in next {
            if rs.insert(v.clone()) {
                cleaned.push(v);
            }
        }
        basis = cleaned;
    }
}

enum EigenlineOutcome<T> {
    NoneCertified,
    Found(Vec<Vec<T>>),
    FoundFloat(Vec<Vec<f64>>, String),
    Inconclusive(String),
}

/// Decide whether the tuple has a common eigenline (a 1-dimensional
/// invariant subspace), possibly returning a larger invariant subspace
/// discovered along the way.
fn common_eigenline<T: StructureEntry>(mats: &[Mat<T>]) -> EigenlineOutcome<T> {
    let d = mats[0].dim();
    let scale = max_entry_scale(mats);
    // commuting or not?
    let mut nonzero_commutators: Vec<Mat<T>> = Vec::new();
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            let c = commutator(&mats[i], &mats[j]);
            let zero = (0..d).all(|r| c.row(r).iter().all(|x| x.is_negligible(&scale)));
            if !zero {
                nonzero_commutators.push(c);
            }
        }
    }
    if nonzero_commutators.is_empty() {
        // commuting family
        let pivot = mats.iter().find(|m| !is_scalar(m, &scale));
        let Some(pivot) = pivot else {
            // all scalar: every line is invariant
            let mut e1 = vec![T::zero(); d];
            e1[0] = T::one();
            return EigenlineOutcome::Found(vec![e1]);
        };
        let eig = T::eigen_spaces(pivot);
        let mut best: Option<Vec<Vec<T>>> = None;
        for space in eig.spaces {
            if space.is_empty() || space.len() >= d {
                continue;
            }
            if verify_invariant(mats, &space) && best.as_ref().is_none_or(|b| space.len() < b.len())
            {
                best = Some(space);
            }
        }
        if let Some(w) = best {
            return EigenlineOutcome::Found(w);
        }
        if eig.complete {
            return EigenlineOutcome::NoneCertified;
        }
        if let Some(decision) = T::quadratic_eigenline(mats, pivot) {
            return match decision {
                QuadDecision::Found(v) => EigenlineOutcome::FoundFloat(
                    vec![v],
                    "irrational eigenline of a commuting pair, verified in Q(sqrt(D))".into(),
                ),
                QuadDecision::NoneCertified => EigenlineOutcome::NoneCertified,
            };
        }
        return EigenlineOutcome::Inconclusive(
            "commuting tuple with irrational real eigenvalues".into(),
        );
    }
    // Non-commuting: any common eigenvector is killed by every commutator.
    let mut k_rows: Vec<Vec<T>> = Vec::new();
    for c in &nonzero_commutators {
        for r in 0..d {
            k_rows.push(c.row(r).to_vec());
        }
    }
    let k_basis = kernel_of_rows(&k_rows, d);
    if k_basis.is_empty() {
        return EigenlineOutcome::NoneCertified;
    }
    let invariant = largest_invariant_inside(mats, &k_basis);
    if invariant.is_empty() {
        return EigenlineOutcome::NoneCertified;
    }
    if invariant.len() < d {
        return EigenlineOutcome::Found(invariant);
    }
    EigenlineOutcome::Inconclusive("commutator kernel analysis did not separate".into())
}

/// Orthogonal-complement basis of a row set (kernel of the stacked rows).
fn complement_basis<T: Entry>(rows: &[Vec<T>], d: usize) -> Vec<Vec<T>> {
    kernel_of_rows(rows, d)
}

pub(crate) struct Analysis<T> {
    pub outcome: SubspaceOutcome<T>,
    pub closure_rank: usize,
}

/// Search for a minimal proper nontrivial invariant subspace.
pub(crate) fn minimal_invariant_subspace<T: StructureEntry>(mats: &[Mat<T>]) -> Analysis<T> {
    let d = mats[0].dim();
    if d <= 1 {
        return Analysis {
            outcome: SubspaceOutcome::NoneCertified("dimension 1".into()),
            closure_rank: 1,
        };
    }
    let cl = closure(mats);
    if cl.rank == d * d {
        return Analysis {
            outcome: SubspaceOutcome::NoneCertified(format!(
                "algebra closure has full rank {}",
                d * d
            )),
            closure_rank: cl.rank,
        };
    }

    let mut candidates: Vec<Vec<Vec<T>>> = Vec::new();
    let push_candidate = |basis: Vec<Vec<T>>, candidates: &mut Vec<Vec<Vec<T>>>| {
        if basis.is_empty() || basis.len() >= d {
            return;
        }
        if verify_invariant(mats, &basis) {
            candidates.push(basis);
        }
    };

    // 1. probe vectors: orbit span deficiencies
    let mut probes: Vec<Vec<T>> = Vec::new();
    for i in 0..d {
        let mut v = vec![T::zero(); d];
        v[i] = T::one();
        probes.push(v);
    }
    for i in 0..d {
        for j in i + 1..d {
            let mut v = vec![T::zero(); d];
            v[i] = T::one();
            v[j] = T::one();
            probes.push(v);
        }
    }
    probes.push(vec![T::one(); d]);
    let mut rng = ChaCha12Rng::seed_from_u64(0x5eed_cafe);
    for _ in 0..8 {
        let v: Vec<T> = (0..d)
            .map(|_| T::from_i64(rng.random_range(-3..=3)))
            .collect();
        if v.iter().any(|x| !x.is_zero()) {
            probes.push(v);
        }
    }
    // kernel-seeded probes (MeatAxe style): singular closure elements and
    // commutators contribute their kernel vectors
    for e in &cl.elements {
        for v in kernel(e) {
            probes.push(v);
        }
    }
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            for v in kernel(&commutator(&mats[i], &mats[j])) {
                probes.push(v);
            }
        }
    }
    for v in &probes {
        if v.iter().all(|x| x.is_zero()) {
            continue;
        }
        let mut orbit: RowSpace<T> = RowSpace::new(d);
        for e in &cl.elements {
            orbit.insert(e.apply(v));
            if orbit.rank() == d {
                break;
            }
        }
        if orbit.rank() < d {
            push_candidate(orbit.rows().to_vec(), &mut candidates);
        }
    }

    // 2. eigenline analysis on the tuple and its transposes
    let mut none_primal = false;
    let mut none_dual = false;
    let mut float_witness: Option<(Vec<Vec<f64>>, String)> = None;
    let mut inconclusive_note: Option<String> = None;
    match common_eigenline(mats) {
        EigenlineOutcome::Found(w) => push_candidate(w, &mut candidates),
        EigenlineOutcome::NoneCertified => none_primal = true,
        EigenlineOutcome::FoundFloat(w, note) => float_witness = Some((w, note)),
        EigenlineOutcome::Inconclusive(note) => inconclusive_note = Some(note),
    }
    let transposed: Vec<Mat<T>> = mats.iter().map(|m| m.transpose()).collect();
    match common_eigenline(&transposed) {
        EigenlineOutcome::Found(w) => {
            push_candidate(complement_basis(&w, d), &mut candidates);
        }
        EigenlineOutcome::NoneCertified => none_dual = true,
        EigenlineOutcome::FoundFloat(w_f, note) => {
            // complement in float coordinates
            let rows: Vec<Vec<f64>> = w_f;
            let comp = kernel_of_rows(&rows, d);
            if float_witness.is_none() {
                float_witness = Some((comp, note));
            }
        }
        EigenlineOutcome::Inconclusive(note) => {
            if inconclusive_note.is_none() {
                inconclusive_note = Some(note);
            }
        }
    }

    if !candidates.is_empty() {
        candidates.sort_by_key(|c| c.len());
        return Analysis {
            outcome: SubspaceOutcome::Witness(candidates.swap_remove(0)),
            closure_rank: cl.rank,
        };
    }
    if let Some((w, note)) = float_witness {
        return Analysis {
            outcome: SubspaceOutcome::FloatWitness(w, note),
            closure_rank: cl.rank,
        };
    }
    if none_primal && none_dual && d <= 3 {
        // in dimension <= 3 every proper nontrivial subspace is a line or
        // a hyperplane, and hyperplanes for the tuple are lines for the
        // transposes
        return Analysis {
            outcome: SubspaceOutcome::NoneCertified(
                "no common eigenline for the tuple or its transposes".into(),
            ),
            closure_rank: cl.rank,
        };
    }
    Analysis {
        outcome: SubspaceOutcome::Inconclusive(inconclusive_note.unwrap_or_else(|| {
            format!(
                "closure rank {} < {} and probes found no witness",
                cl.rank,
                d * d
            )
        })),
        closure_rank: cl.rank,
    }
}

fn witness_from_rows_q(rows: Vec<Vec<Rational>>) -> Witness {
    let basis_f = rows
        .iter()
        .map(|r| r.iter().map(rational_to_f64).collect())
        .collect();
    Witness {
        basis_f,
        basis_q: Some(rows),
    }
}

fn witness_from_rows_f(rows: Vec<Vec<f64>>) -> Witness {
    Witness {
        basis_f: rows,
        basis_q: None,
    }
}

/// Irreducibility of a matrix tuple.
///
/// Rational inputs are decided exactly: full algebra closure certifies
/// irreducibility outright, witnesses are verified exactly, and in
/// dimensions <= 3 the common-eigenline analysis of the tuple and its
/// transposes makes the decision complete. Float inputs can produce a
/// certified Reducible (the witness is checkable) but never a certified
/// Irreducible.
pub fn irreducibility_test(tuple: &MatrixTuple) -> StructureReport {
    match tuple.exact_mats() {
        Some(mats) => {
            let analysis = minimal_invariant_subspace(mats);
            let mut notes = vec![format!("closure_rank={}", analysis.closure_rank)];
            match analysis.outcome {
                SubspaceOutcome::Witness(rows) => StructureReport {
                    verdict: Verdict::Reducible(witness_from_rows_q(rows)),
                    certified: true,
                    backend: Backend::Exact,
                    notes,
                },
                SubspaceOutcome::FloatWitness(rows, note) => {
                    notes.push(note);
                    StructureReport {
                        verdict: Verdict::Reducible(witness_from_rows_f(rows)),
                        certified: false,
                        backend: Backend::Exact,
                        notes,
                    }
                }
                SubspaceOutcome::NoneCertified(note) => {
                    notes.push(note);
                    StructureReport {
                        verdict: Verdict::Irreducible,
                        certified: true,
                        backend: Backend::Exact,
                        notes,
                    }
                }
                SubspaceOutcome::Inconclusive(note) => {
                    notes.push(note);
                    // last resort: a float witness (e.g. a shared
                    // irrational eigenline of a commuting tuple) still
                    // settles the verdict, just without a certificate
                    let float_analysis = minimal_invariant_subspace(tuple.float_mats());
                    if let SubspaceOutcome::Witness(rows) = float_analysis.outcome {
                        notes.push(
                            "witness found in float arithmetic; exact analysis inconclusive".into(),
                        );
                        return StructureReport {
                            verdict: Verdict::Reducible(witness_from_rows_f(rows)),
                            certified: false,
                            backend: Backend::Exact,
                            notes,
                        };
                    }
                    StructureReport {
                        verdict: Verdict::Unknown,
                        certified: false,
                        backend: Backend::Exact,
                        notes,
                    }
                }
            }
        }
        None => {
            let analysis = minimal_invariant_subspace(tuple.float_mats());
            let mut notes = vec![format!("closure_rank={}", analysis.closure_rank)];
            match analysis.outcome {
                SubspaceOutcome::Witness(rows) => StructureReport {
                    verdict: Verdict::Reducible(witness_from_rows_f(rows)),
                    certified: true,
                    backend: Backend::Float,
                    notes,
                },
                SubspaceOutcome::FloatWitness(rows, note) => {
                    notes.push(note);
                    StructureReport {
                        verdict: Verdict::Reducible(witness_from_rows_f(rows)),
                        certified: false,
                        backend: Backend::Float,
                        notes,
                    }
                }
                SubspaceOutcome::NoneCertified(note) => {
                    notes.push(note);
                    notes.push("float backend: irreducible verdict is not a certificate".into());
                    StructureReport {
                        verdict: Verdict::Irreducible,
                        certified: false,
                        backend: Backend::Float,
                        notes,
                    }
                }
                SubspaceOutcome::Inconclusive(note) => {
                    notes.push(note);
                    StructureReport {
                        verdict: Verdict::Unknown,
                        certified: false,
                        backend: Backend::Float,
                        notes,
                    }
                }
            }
        }
    }
}

/// k-irreducibility: irreducibility of the tuple of k-th exterior powers.
pub fn k_irreducibility(tuple: &MatrixTuple, k: usize) -> Result<StructureReport> {
    if k > tuple.dim() {
        return Err(Error::Input(format!(
            "k={k} out of range for dimension {}",
            tuple.dim()
        )));
    }
    let wedge = tuple.wedge(k)?;
    Ok(irreducibility_test(&wedge))
}
