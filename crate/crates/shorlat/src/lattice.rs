//! Rank-2 lattice basis reduction over `Z^d` with exact integer arithmetic.
//!
//! The reduction loop repeatedly swaps the basis vectors so the shorter one
//! comes first and replaces the longer one by its shortest translate, until
//! the termination test on squared norms holds. The relaxed variant
//! terminates once `|u|^2 <= tau * |v|^2` for a rational `tau >= 1`; `tau = 1`
//! is the classic algorithm, whose first output vector is a shortest nonzero
//! vector of the lattice.
//!
//! A brute-force enumeration oracle is provided for cross-checking; it is
//! deliberately independent of the reduction path.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numtheory::{closest_integer, sign};

/// Vector with arbitrary-precision integer entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntVector(Vec<BigInt>);

impl IntVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        IntVector(entries)
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        IntVector(entries.iter().map(|&e| BigInt::from(e)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Exact squared Euclidean norm.
    pub fn norm_sq(&self) -> BigInt {
        self.0.iter().map(|e| e * e).sum()
    }

    /// Exact inner product; dimensions must agree.
    pub fn dot(&self, other: &Self) -> BigInt {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// `self - m * u`.
    fn sub_scaled(&self, m: &BigInt, u: &Self) -> Self {
        IntVector(
            self.0
                .iter()
                .zip(&u.0)
                .map(|(a, b)| a - m * b)
                .collect(),
        )
    }

    pub fn negated(&self) -> Self {
        IntVector(self.0.iter().map(|e| -e).collect())
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: &BigInt, b: &BigInt, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        IntVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        )
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Ordered generator pair of a rank-2 lattice in `Z^d`, `d >= 2`.
///
/// Linear independence is not checked here; the reduction detects dependent
/// inputs lazily when a translate collapses to the zero vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    u: IntVector,
    v: IntVector,
}

impl Basis {
    pub fn new(u: IntVector, v: IntVector) -> Result<Self> {
        if u.dim() != v.dim() {
            return Err(Error::InvalidParameter(format!(
                "basis vectors have mismatched dimensions {} and {}",
                u.dim(),
                v.dim()
            )));
        }
        if u.dim() < 2 {
            return Err(Error::InvalidParameter(
                "basis vectors must have dimension at least 2".into(),
            ));
        }
        Ok(Basis { u, v })
    }

    pub fn from_i64s(u: &[i64], v: &[i64]) -> Result<Self> {
        Basis::new(IntVector::from_i64s(u), IntVector::from_i64s(v))
    }

    pub fn u(&self) -> &IntVector {
        &self.u
    }

    pub fn v(&self) -> &IntVector {
        &self.v
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    /// Squared length of the basis: max of the two squared norms.
    pub fn m_squared(&self) -> BigInt {
        self.u.norm_sq().max(self.v.norm_sq())
    }

    /// Gram determinant `|u|^2 |v|^2 - (u.v)^2`; zero iff dependent.
    pub fn gram_det(&self) -> BigInt {
        let guu = self.u.norm_sq();
        let gvv = self.v.norm_sq();
        let guv = self.u.dot(&self.v);
        guu * gvv - &guv * &guv
    }
}

/// Per-run record of a reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    /// Number of executions of the loop body.
    pub iterations: u64,
    /// Number of exchanges of the two basis vectors.
    pub swaps: u64,
    /// Squared length of the input basis (kept squared to stay exact).
    pub initial_m_squared: BigInt,
    /// Relaxation parameter of the termination test; 1 for the plain run.
    pub t_squared: BigRational,
    /// `(|u|^2, |v|^2)` after each iteration; length equals `iterations`.
    pub per_iteration_norms: Vec<(BigInt, BigInt)>,
    /// Coefficients of the output pair over the input pair, row-major;
    /// its determinant is +-1.
    pub transform: [[BigInt; 2]; 2],
}

/// Shortest vector of `{ +-(v - m*u) : m integer }` forming a nonnegative
/// inner product with `u`.
///
/// The output `w` satisfies `0 <= u.w <= |u|^2 / 2` and is no longer than
/// `v - m'*u` for every integer `m'`.
pub fn chi(v: &IntVector, u: &IntVector) -> Result<IntVector> {
    let (w, _, _) = chi_with_coeffs(v, u)?;
    Ok(w)
}

/// [`chi`] together with the translate `m` and the sign applied.
fn chi_with_coeffs(v: &IntVector, u: &IntVector) -> Result<(IntVector, BigInt, i32)> {
    if u.is_zero() {
        return Err(Error::ZeroVector);
    }
    let f = BigRational::new(u.dot(v), u.norm_sq());
    let m = closest_integer(&f);
    let eps = sign(&(f - BigRational::from_integer(m.clone())));
    let mut w = v.sub_scaled(&m, u);
    if eps < 0 {
        w = w.negated();
    }
    Ok((w, m, eps))
}

fn reduce_inner(
    basis: &Basis,
    tau: &BigRational,
    mut snapshot: Option<&mut Vec<IterationSnapshot>>,
) -> Result<(Basis, ReductionTrace)> {
    let mut u = basis.u().clone();
    let mut v = basis.v().clone();
    let initial_m_squared = basis.m_squared();
    // Output rows expressed over the input pair; kept unimodular throughout.
    let mut transform = [
        [BigInt::one(), BigInt::zero()],
        [BigInt::zero(), BigInt::one()],
    ];
    let mut iterations: u64 = 0;
    let mut swaps: u64 = 0;
    let mut norms = Vec::new();

    loop {
        iterations += 1;
        if u.norm_sq() > v.norm_sq() {
            std::mem::swap(&mut u, &mut v);
            transform.swap(0, 1);
            swaps += 1;
        }
        let (w, m, eps) = match chi_with_coeffs(&v, &u) {
            Ok(out) => out,
            Err(Error::ZeroVector) => return Err(Error::DegenerateLattice),
            Err(e) => return Err(e),
        };
        v = w;
        if v.is_zero() {
            return Err(Error::DegenerateLattice);
        }
        let eps = BigInt::from(eps);
        let (u_row, v_row) = transform.split_at_mut(1);
        for (vj, uj) in v_row[0].iter_mut().zip(&u_row[0]) {
            *vj = &eps * (&*vj - &m * uj);
        }
        let un = u.norm_sq();
        let vn = v.norm_sq();
        norms.push((un.clone(), vn.clone()));
        if let Some(snaps) = snapshot.as_deref_mut() {
            snaps.push((u.clone(), v.clone()));
        }
        // |u|^2 <= tau * |v|^2, compared exactly by cross-multiplication.
        if un * tau.denom() <= vn * tau.numer() {
            break;
        }
    }

    let trace = ReductionTrace {
        iterations,
        swaps,
        initial_m_squared,
        t_squared: tau.clone(),
        per_iteration_norms: norms,
        transform,
    };
    Ok((Basis { u, v }, trace))
}

/// Plain reduction; the output `u` is a shortest nonzero lattice vector and
/// the output pair satisfies `|v|^2 >= |u|^2` and `0 <= u.v <= |u|^2 / 2`.
pub fn gauss_reduce(basis: &Basis) -> Result<(Basis, ReductionTrace)> {
    reduce_inner(basis, &BigRational::one(), None)
}

/// Relaxed reduction terminating at `|u|^2 <= t_squared * |v|^2`.
///
/// `t_squared` must be strictly greater than 1.
pub fn gauss_reduce_t(basis: &Basis, t_squared: &BigRational) -> Result<(Basis, ReductionTrace)> {
    if t_squared <= &BigRational::one() {
        return Err(Error::InvalidParameter(format!(
            "t_squared must exceed 1, got {t_squared}"
        )));
    }
    reduce_inner(basis, t_squared, None)
}

/// Basis pair recorded after one reduction iteration.
pub type IterationSnapshot = (IntVector, IntVector);

/// Like [`gauss_reduce_t`] but also returns the basis after every iteration,
/// for step-by-step inspection. Accepts `t_squared >= 1`.
pub fn gauss_reduce_trajectory(
    basis: &Basis,
    t_squared: &BigRational,
) -> Result<(Basis, ReductionTrace, Vec<IterationSnapshot>)> {
    if t_squared < &BigRational::one() {
        return Err(Error::InvalidParameter(format!(
            "t_squared must be at least 1, got {t_squared}"
        )));
    }
    let mut snaps = Vec::new();
    let (basis, trace) = reduce_inner(basis, t_squared, Some(&mut snaps))?;
    Ok((basis, trace, snaps))
}

/// Upper bound on plain-reduction iterations for a basis of squared length
/// `m_squared`: `ceil(log_3 m_squared) + 1`, decided against powers of 3.
pub fn iteration_bound(m_squared: &BigInt) -> u64 {
    let mut power = BigInt::one();
    let mut log = 0u64;
    while &power < m_squared {
        power *= 3;
        log += 1;
    }
    log + 1
}

/// Iteration bound for a relaxed run: `ceil(log_{t^2} m_squared)`, decided
/// against exact rational powers, floored at 1 because the loop body always
/// executes at least once under this crate's counting convention.
pub fn relaxed_iteration_bound(m_squared: &BigInt, t_squared: &BigRational) -> Result<u64> {
    if t_squared <= &BigRational::one() {
        return Err(Error::InvalidParameter(format!(
            "t_squared must exceed 1, got {t_squared}"
        )));
    }
    let target = BigRational::from_integer(m_squared.clone());
    let mut power = BigRational::one();
    let mut log = 0u64;
    while power < target {
        power *= t_squared;
        log += 1;
    }
    Ok(log.max(1))
}

/// Default cap on cells visited by [`shortest_vector_oracle`].
pub const DEFAULT_ORACLE_BUDGET: u64 = 100_000_000;

/// Result of the brute-force enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortestVector {
    /// A nonzero lattice vector of minimal norm.
    pub vector: IntVector,
    /// Its exact squared norm.
    pub norm_sq: BigInt,
    /// How many coefficient pairs attain the minimum, counted up to sign.
    pub minimal_classes: u64,
}

/// Brute-force shortest-vector search by exhaustive coefficient enumeration.
///
/// Every lattice vector `w = m*u + n*v` satisfies `|w| >= |m| * |u*|` where
/// `u*` is the component of `u` orthogonal to `v` (and symmetrically for
/// `n`), so all coefficient pairs outside the box `|m| <= |c| / |u*|`,
/// `|n| <= |c| / |v*|` are strictly longer than the best candidate `c` found
/// so far. Cells are visited in shells of increasing `max(|m|, |n|)`, one
/// representative per `+-` class, shrinking the box as `c` improves; the
/// shells inside the final box cover every potential minimum.
pub fn shortest_vector_oracle(basis: &Basis) -> Result<ShortestVector> {
    shortest_vector_oracle_with_budget(basis, DEFAULT_ORACLE_BUDGET)
}

/// [`shortest_vector_oracle`] with an explicit visited-cell budget.
pub fn shortest_vector_oracle_with_budget(basis: &Basis, budget: u64) -> Result<ShortestVector> {
    let guu = basis.u().norm_sq();
    let gvv = basis.v().norm_sq();
    let guv = basis.u().dot(basis.v());
    let det = &guu * &gvv - &guv * &guv;
    if det.is_zero() {
        return Err(Error::DegenerateLattice);
    }
    debug_assert!(det.is_positive());

    let initial_best = guu.clone().min(gvv.clone());
    let initial_bounds = (
        coeff_bound(&initial_best, &gvv, &det),
        coeff_bound(&initial_best, &guu, &det),
    );

    // The quadratic form fits in i128 for the whole run iff it fits on the
    // initial box corners; the box only shrinks afterwards.
    let hit = if form_fits_i128(&guu, &guv, &gvv, initial_bounds) {
        let guu_s = guu.to_i128().unwrap();
        let guv_s = guv.to_i128().unwrap();
        let gvv_s = gvv.to_i128().unwrap();
        let scan = CellScan {
            eval: |m: i64, n: i64| {
                let (m, n) = (m as i128, n as i128);
                m * m * guu_s + 2 * m * n * guv_s + n * n * gvv_s
            },
            bounds_from: |best: &i128| {
                let best = BigInt::from(*best);
                (coeff_bound(&best, &gvv, &det), coeff_bound(&best, &guu, &det))
            },
            budget,
            best_q: initial_best.to_i128().unwrap(),
            best_cell: None,
            classes: 0,
            m_bound: initial_bounds.0,
            n_bound: initial_bounds.1,
            visited: 0,
        }
        .run()?;
        scan.best_cell.map(|cell| (BigInt::from(scan.best_q), cell, scan.classes))
    } else {
        let scan = CellScan {
            eval: |m: i64, n: i64| {
                let (m, n) = (BigInt::from(m), BigInt::from(n));
                &m * &m * &guu + BigInt::from(2) * &m * &n * &guv + &n * &n * &gvv
            },
            bounds_from: |best: &BigInt| {
                (coeff_bound(best, &gvv, &det), coeff_bound(best, &guu, &det))
            },
            budget,
            best_q: initial_best,
            best_cell: None,
            classes: 0,
            m_bound: initial_bounds.0,
            n_bound: initial_bounds.1,
            visited: 0,
        }
        .run()?;
        scan.best_cell.map(|cell| (scan.best_q, cell, scan.classes))
    };

    // At least one of the input vectors lies inside the initial box, so the
    // search always lands on some cell.
    let (norm_sq, (m, n), classes) = hit.expect("enumeration covers an input vector");
    let vector = basis.u().combine(&BigInt::from(m), &BigInt::from(n), basis.v());
    debug_assert_eq!(vector.norm_sq(), norm_sq);
    Ok(ShortestVector {
        vector,
        norm_sq,
        minimal_classes: classes,
    })
}

/// Largest coefficient magnitude that can still reach `best_q`:
/// `floor(sqrt(best_q * gram_other / det))`.
fn coeff_bound(best_q: &BigInt, gram_other: &BigInt, det: &BigInt) -> u64 {
    let ratio = (best_q * gram_other).div_floor(det);
    let root = ratio.sqrt();
    root.to_u64().unwrap_or(u64::MAX)
}

fn form_fits_i128(guu: &BigInt, guv: &BigInt, gvv: &BigInt, bounds: (u64, u64)) -> bool {
    let (mb, nb) = (BigInt::from(bounds.0), BigInt::from(bounds.1));
    let worst = &mb * &mb * guu + BigInt::from(2) * &mb * &nb * guv.abs() + &nb * &nb * gvv;
    worst < (BigInt::one() << 126)
}

/// Shell enumeration over one representative of each `+-` coefficient class,
/// tracking the minimal form value, its cell, and the count of minimal
/// classes while the box bounds shrink around the best candidate.
struct CellScan<Q, E, B> {
    eval: E,
    bounds_from: B,
    budget: u64,
    best_q: Q,
    best_cell: Option<(i64, i64)>,
    classes: u64,
    m_bound: u64,
    n_bound: u64,
    visited: u64,
}

impl<Q, E, B> CellScan<Q, E, B>
where
    Q: Clone + Ord,
    E: Fn(i64, i64) -> Q,
    B: Fn(&Q) -> (u64, u64),
{
    fn visit(&mut self, m: i64, n: i64) -> Result<()> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Error::TooLarge {
                budget: self.budget,
            });
        }
        let q = (self.eval)(m, n);
        if q < self.best_q {
            self.best_q = q;
            self.best_cell = Some((m, n));
            self.classes = 1;
            let (mb, nb) = (self.bounds_from)(&self.best_q);
            self.m_bound = mb;
            self.n_bound = nb;
        } else if q == self.best_q {
            if self.best_cell.is_none() {
                self.best_cell = Some((m, n));
                self.classes = 1;
            } else {
                self.classes += 1;
            }
        }
        Ok(())
    }

    fn run(mut self) -> Result<Self> {
        // Representatives with max(|m|, |n|) = rho in the half-plane m > 0,
        // plus the single cell (0, rho).
        let mut rho: u64 = 1;
        while rho <= self.m_bound.max(self.n_bound) {
            let r = rho.min(i64::MAX as u64) as i64;
            if rho <= self.n_bound {
                self.visit(0, r)?;
            }
            if rho <= self.m_bound {
                let n_cap = rho.min(self.n_bound).min(i64::MAX as u64) as i64;
                for n in -n_cap..=n_cap {
                    self.visit(r, n)?;
                }
            }
            if rho <= self.n_bound {
                let m_cap = (rho - 1).min(self.m_bound).min(i64::MAX as u64) as i64;
                for m in 1..=m_cap {
                    self.visit(m, r)?;
                    self.visit(m, -r)?;
                }
            }
            rho += 1;
        }
        Ok(self)
    }
}
