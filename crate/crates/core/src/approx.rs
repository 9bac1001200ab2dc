//! Partition-based approximation of finitely many functions by elements of a
//! subspace isometric to `ℝ^D_p`.
//!
//! Given `x_1..x_n` and a grid size `N`, put `φ = Σ_j |x_j|` and label every atom,
//! for every input, by the slot `k` with `(k/nN)·φ < |x_i| ≤ ((k+1)/nN)·φ` and the
//! sign of `x_i` (or `⊗` where `x_i` vanishes). Atoms sharing a full label vector
//! form a cell `B_l`; the functions `z_l = 1_{B_l}·φ` have disjoint supports, so
//! `‖Σ λ_l z_l‖^p = Σ |λ_l|^p ‖z_l‖^p`, and `y_i = Σ_l ±(k/nN) z_l` is within
//! `φ/(nN)` of `x_i` at every atom.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{MeasureSpace, SimpleFunction};
use crate::scalar::{Exponent, Scalar};
use crate::tol;

/// Position of one input's value at one atom on the `nN`-grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Pos(u64),
    Neg(u64),
    Zero,
}

impl Label {
    /// Signed grid coordinate `±k`.
    pub fn signed_slot(self) -> i64 {
        match self {
            Label::Pos(k) => k as i64,
            Label::Neg(k) => -(k as i64),
            Label::Zero => 0,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Pos(k) => write!(f, "+{k}"),
            Label::Neg(k) => write!(f, "-{k}"),
            Label::Zero => f.write_str("x"),
        }
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Schema(format!("bad label {s:?}"));
        match s.as_bytes().first() {
            Some(b'x') if s.len() == 1 => Ok(Label::Zero),
            Some(b'+') => s[1..].parse().map(Label::Pos).map_err(|_| bad()),
            Some(b'-') => s[1..].parse().map(Label::Neg).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

/// Label of every (atom, input) pair, together with `φ`.
#[derive(Debug, Clone)]
pub struct LabeledPartition<S> {
    subdivisions: u64,
    phi: SimpleFunction<S>,
    /// `labels[atom][input]`
    labels: Vec<Vec<Label>>,
}

impl<S: Scalar> LabeledPartition<S> {
    /// `nN`, the number of grid slots.
    pub fn subdivisions(&self) -> u64 {
        self.subdivisions
    }

    pub fn phi(&self) -> &SimpleFunction<S> {
        &self.phi
    }

    pub fn label(&self, atom: usize, input: usize) -> Label {
        self.labels[atom][input]
    }

    pub fn atom_labels(&self, atom: usize) -> &[Label] {
        &self.labels[atom]
    }

    /// All cells `B_l`, including the one where every input vanishes, keyed by label
    /// vector. Together they partition the atoms.
    pub fn cells(&self) -> BTreeMap<Vec<Label>, Vec<usize>> {
        let mut cells: BTreeMap<Vec<Label>, Vec<usize>> = BTreeMap::new();
        for (atom, l) in self.labels.iter().enumerate() {
            cells.entry(l.clone()).or_default().push(atom);
        }
        cells
    }

    /// Cells on which `φ` does not vanish, i.e. those carrying a nonzero `z_l`.
    pub fn support_cells(&self) -> Vec<Cell> {
        self.cells()
            .into_iter()
            .filter(|(l, _)| l.iter().any(|x| *x != Label::Zero))
            .map(|(label, atoms)| Cell { label, atoms })
            .collect()
    }
}

fn grid_size(n: usize, n_grid: u64) -> Result<u64> {
    (n as u64)
        .checked_mul(n_grid)
        .filter(|m| *m <= i64::MAX as u64)
        .ok_or_else(|| Error::Parameter("n·N too large".into()))
}

fn check_family<S: Scalar>(x: &[SimpleFunction<S>], n_grid: u64) -> Result<()> {
    if n_grid == 0 {
        return Err(Error::Parameter("N must be at least 1".into()));
    }
    let first = x
        .first()
        .ok_or_else(|| Error::Parameter("at least one input function is required".into()))?;
    for f in &x[1..] {
        first.check_same_space(f)?;
    }
    Ok(())
}

/// Labels every atom for every input on the grid with `n·N` slots.
///
/// A value exactly on a grid point `((k+1)/nN)·φ` belongs to slot `k`.
pub fn partition_labels<S: Scalar>(x: &[SimpleFunction<S>], n_grid: u64) -> Result<LabeledPartition<S>> {
    check_family(x, n_grid)?;
    let m = grid_size(x.len(), n_grid)?;
    let space = x[0].space().clone();
    let mut phi = SimpleFunction::zero(space.clone());
    for f in x {
        phi = phi.add(&f.pointwise_abs())?;
    }
    let m_s = S::from_frac(m as i64, 1);
    let labels = (0..space.len())
        .map(|atom| {
            let ph = &phi.values()[atom];
            x.iter()
                .map(|f| {
                    let v = &f.values()[atom];
                    if v.is_zero() {
                        return Label::Zero;
                    }
                    let a = v.abs();
                    let ratio = a.clone() * m_s.clone() / ph.clone();
                    let mut k = ratio.ceil_u64().clamp(1, m) - 1;
                    // only moves on the floating path
                    let bound = |k: u64| S::from_frac(k as i64, m) * ph.clone();
                    while k > 0 && bound(k) >= a {
                        k -= 1;
                    }
                    while k + 1 < m && bound(k + 1) < a {
                        k += 1;
                    }
                    if v.is_positive() {
                        Label::Pos(k)
                    } else {
                        Label::Neg(k)
                    }
                })
                .collect()
        })
        .collect();
    Ok(LabeledPartition { subdivisions: m, phi, labels })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub label: Vec<Label>,
    pub atoms: Vec<usize>,
}

/// Disjointly supported basis functions `z_l` and their weights `w_l = ‖z_l‖^p`.
///
/// The map `e_l ↦ z_l / w_l^{1/p}` is an isometry from `ℝ^D_p` onto the span.
#[derive(Debug, Clone)]
pub struct LpBasisCertificate<S> {
    pub p: Exponent,
    pub cells: Vec<Cell>,
    pub basis: Vec<SimpleFunction<S>>,
    pub weights: Vec<S>,
}

impl<S: Scalar> LpBasisCertificate<S> {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// `Σ_l λ_l z_l`.
    pub fn combine(&self, space: &Arc<MeasureSpace>, coords: &[S]) -> Result<SimpleFunction<S>> {
        if coords.len() != self.basis.len() {
            return Err(Error::Parameter(format!(
                "{} coordinates for a basis of size {}",
                coords.len(),
                self.basis.len()
            )));
        }
        let mut acc = SimpleFunction::zero(space.clone());
        for (z, c) in self.basis.iter().zip(coords) {
            if !c.is_zero() {
                acc = acc.add(&z.scale(c))?;
            }
        }
        Ok(acc)
    }

    /// `Σ_l |λ_l|^p w_l`, the right-hand side of the isometry identity.
    pub fn weighted_pow(&self, coords: &[S]) -> Result<S> {
        let mut total = S::zero();
        for (c, w) in coords.iter().zip(&self.weights) {
            total = total + c.pow_p(self.p)? * w.clone();
        }
        Ok(total)
    }

    /// `β_l = w_l^{-1/p}`: the factor turning `z_l` into a unit vector.
    pub fn unit_scale(&self, l: usize) -> f64 {
        1.0 / self.p.root(self.weights[l].to_f64())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Inputs of norm below one, error at most `1/N`.
    Plain,
    /// Additionally every approximant has norm at most one.
    Normalized,
    /// Inputs and approximants of norm exactly one.
    Unit,
    /// The normalized construction applied to `v/max{‖v‖,1}`.
    Axiom,
}

impl Mode {
    /// Multiplier from the requested `N` to the grid the base construction runs on.
    pub fn grid_factor(self) -> u64 {
        match self {
            Mode::Plain => 1,
            Mode::Normalized | Mode::Axiom => 2,
            Mode::Unit => 4,
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Mode::Plain),
            "normalized" => Ok(Mode::Normalized),
            "unit" => Ok(Mode::Unit),
            "axiom" => Ok(Mode::Axiom),
            _ => Err(Error::Parameter(format!("unknown mode {s:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Plain => "plain",
            Mode::Normalized => "normalized",
            Mode::Unit => "unit",
            Mode::Axiom => "axiom",
        })
    }
}

/// Approximants `y_i = α_i Σ_l λ_{i,l} z_l` of the inputs together with the basis
/// certificate they live in.
///
/// `coords` holds `λ` exactly; the optional `scales` are the floating rescaling
/// factors `α_i` introduced by the normalized and unit constructions.
#[derive(Debug, Clone)]
pub struct ApproximationWitness<S> {
    pub mode: Mode,
    pub n_grid: u64,
    pub inputs: Vec<SimpleFunction<S>>,
    pub certificate: LpBasisCertificate<S>,
    pub coords: Vec<Vec<S>>,
    pub scales: Vec<Option<f64>>,
    pub error_bound_pow: S,
    pub dim_bound: BigUint,
}

impl<S: Scalar> ApproximationWitness<S> {
    pub fn p(&self) -> Exponent {
        self.certificate.p
    }

    pub fn n(&self) -> usize {
        self.inputs.len()
    }

    /// Grid size the base construction ran with.
    pub fn base_grid(&self) -> u64 {
        self.n_grid * self.mode.grid_factor()
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        self.inputs[0].space()
    }

    pub fn dimension(&self) -> usize {
        self.certificate.dimension()
    }

    /// The approximant before any rescaling.
    pub fn raw_approximant(&self, i: usize) -> Result<SimpleFunction<S>> {
        self.certificate.combine(self.space(), &self.coords[i])
    }

    pub fn approximant(&self, i: usize) -> Result<SimpleFunction<f64>> {
        let raw = self.raw_approximant(i)?.to_f64();
        Ok(match self.scales[i] {
            Some(a) => raw.scale(&a),
            None => raw,
        })
    }

    /// Coordinates of `y_i` against the unit vectors `z_l / ‖z_l‖`.
    pub fn unit_coords(&self, i: usize) -> Vec<f64> {
        let alpha = self.scales[i].unwrap_or(1.0);
        self.coords[i]
            .iter()
            .enumerate()
            .map(|(l, c)| alpha * c.to_f64() / self.certificate.unit_scale(l))
            .collect()
    }

    pub fn is_exact(&self) -> bool {
        S::EXACT && self.p().as_integer().is_some() && self.scales.iter().all(Option::is_none)
    }
}

/// `(2n·N + 1)^n`.
pub fn dimension_bound(n: usize, n_grid: u64) -> BigUint {
    let base = BigUint::from(2u64) * BigUint::from(n as u64) * BigUint::from(n_grid) + BigUint::one();
    num_traits::pow(base, n)
}

fn error_bound_pow<S: Scalar>(n_grid: u64, p: Exponent) -> Result<S> {
    S::from_frac(1, n_grid).pow_p(p)
}

/// Runs the partition construction on grid `n_grid` without checking input norms.
fn construct<S: Scalar>(
    x: &[SimpleFunction<S>],
    n_grid: u64,
    p: Exponent,
) -> Result<(LpBasisCertificate<S>, Vec<Vec<S>>)> {
    let partition = partition_labels(x, n_grid)?;
    let m = partition.subdivisions();
    let space = x[0].space().clone();
    let cells = partition.support_cells();
    let mut basis = Vec::with_capacity(cells.len());
    let mut weights = Vec::with_capacity(cells.len());
    for cell in &cells {
        let mut values = vec![S::zero(); space.len()];
        for &a in &cell.atoms {
            values[a] = partition.phi().values()[a].clone();
        }
        let z = SimpleFunction::new(space.clone(), values)?;
        weights.push(z.lp_norm_pow(p)?);
        basis.push(z);
    }
    let coords = (0..x.len())
        .map(|i| {
            cells
                .iter()
                .map(|c| S::from_frac(c.label[i].signed_slot(), m))
                .collect()
        })
        .collect();
    Ok((LpBasisCertificate { p, cells, basis, weights }, coords))
}

fn require_norm_below_one<S: Scalar>(x: &[SimpleFunction<S>], p: Exponent) -> Result<()> {
    for (i, f) in x.iter().enumerate() {
        let below = if S::EXACT {
            f.lp_norm_pow(p)? < S::one()
        } else {
            f.lp_norm(p)? < 1.0
        };
        if !below {
            return Err(Error::Precondition(format!("input {i} has norm >= 1")));
        }
    }
    Ok(())
}

fn plain<S: Scalar>(x: &[SimpleFunction<S>], n_grid: u64, p: Exponent, mode: Mode) -> Result<ApproximationWitness<S>> {
    check_family(x, n_grid)?;
    let base = n_grid * mode.grid_factor();
    let (certificate, coords) = construct(x, base, p)?;
    Ok(ApproximationWitness {
        mode,
        n_grid,
        inputs: x.to_vec(),
        certificate,
        scales: vec![None; x.len()],
        coords,
        error_bound_pow: error_bound_pow(n_grid, p)?,
        dim_bound: dimension_bound(x.len(), base),
    })
}

/// Approximants within `1/N` of inputs of norm below one, in a subspace isometric to
/// `ℝ^D_p` with `D ≤ (2nN+1)^n`.
pub fn build_approximation<S: Scalar>(x: &[SimpleFunction<S>], n_grid: u64, p: Exponent) -> Result<ApproximationWitness<S>> {
    check_family(x, n_grid)?;
    require_norm_below_one(x, p)?;
    plain(x, n_grid, p, Mode::Plain)
}

fn normalized<S: Scalar>(x: &[SimpleFunction<S>], n_grid: u64, p: Exponent, mode: Mode) -> Result<ApproximationWitness<S>> {
    let mut w = plain(x, n_grid, p, mode)?;
    for i in 0..w.n() {
        let y = w.raw_approximant(i)?;
        let at_least_one = if S::EXACT {
            y.lp_norm_pow(p)? >= S::one()
        } else {
            y.lp_norm(p)? >= 1.0
        };
        if at_least_one {
            w.scales[i] = Some(1.0 / y.lp_norm(p)?);
        }
    }
    Ok(w)
}

/// As [`build_approximation`] with grid `2N`, then rescales every approximant of norm
/// at least one onto the unit sphere. `D ≤ (4nN+1)^n`.
pub fn build_approximation_normalized<S: Scalar>(
    x: &[SimpleFunction<S>],
    n_grid: u64,
    p: Exponent,
) -> Result<ApproximationWitness<S>> {
    check_family(x, n_grid)?;
    require_norm_below_one(x, p)?;
    normalized(x, n_grid, p, Mode::Normalized)
}

/// Unit-norm inputs to unit-norm approximants within `1/N`.
pub fn build_approximation_unit<S: Scalar>(
    x: &[SimpleFunction<S>],
    n_grid: u64,
    p: Exponent,
) -> Result<ApproximationWitness<S>> {
    check_family(x, n_grid)?;
    for (i, f) in x.iter().enumerate() {
        let norm = f.lp_norm(p)?;
        if (norm - 1.0).abs() > tol::BOUND {
            return Err(Error::Precondition(format!("input {i} has norm {norm}, expected 1")));
        }
    }
    let mut w = plain(x, n_grid, p, Mode::Unit)?;
    for i in 0..w.n() {
        let norm = w.raw_approximant(i)?.lp_norm(p)?;
        if norm <= 0.0 {
            return Err(Error::Precondition(format!("approximant {i} vanishes")));
        }
        w.scales[i] = Some(1.0 / norm);
    }
    Ok(w)
}

/// Result of checking one instance of the quantitative axiom.
#[derive(Debug, Clone)]
pub struct AxiomCheck<S> {
    /// The inputs as given, before `v ↦ v/max{‖v‖,1}`.
    pub original_inputs: Vec<SimpleFunction<S>>,
    pub witness: ApproximationWitness<S>,
    pub verdict: Verdict,
}

/// Normalizes the inputs into the unit ball, builds the normalized approximation and
/// verifies every clause of the resulting witness.
pub fn verify_axiom_instance<S: Scalar>(
    x: &[SimpleFunction<S>],
    n_grid: u64,
    p: Exponent,
    options: &VerifyOptions,
) -> Result<AxiomCheck<S>> {
    check_family(x, n_grid)?;
    let tilde = x
        .iter()
        .map(|f| f.normalize_tilde(p))
        .collect::<Result<Vec<_>>>()?;
    let witness = normalized(&tilde, n_grid, p, Mode::Axiom)?;
    let verdict = verify_certificate(&witness, options);
    Ok(AxiomCheck { original_inputs: x.to_vec(), witness, verdict })
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Random coordinate vectors tried on top of the standard basis.
    pub trials: usize,
    pub seed: u64,
    /// Fail unless every check can be carried out in exact arithmetic.
    pub require_exact: bool,
    pub tolerances: tol::Tolerances,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { trials: 50, seed: 0, require_exact: false, tolerances: tol::Tolerances::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    ExactArithmetic,
    Structure,
    CellDisjointness,
    Partition,
    DimensionBound,
    Isometry,
    AtomwiseError,
    ErrorBound,
    NormBound,
    CoordinateRange,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("clause serializes");
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClauseReport {
    pub clause: Clause,
    pub passed: bool,
    pub exact: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub passed: bool,
    pub first_failure: Option<Clause>,
    pub clauses: Vec<ClauseReport>,
}

impl Verdict {
    pub fn clause(&self, c: Clause) -> Option<&ClauseReport> {
        self.clauses.iter().find(|r| r.clause == c)
    }
}

struct Checker {
    reports: Vec<ClauseReport>,
}

impl Checker {
    fn record(&mut self, clause: Clause, exact: bool, outcome: std::result::Result<String, String>) {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.reports.push(ClauseReport { clause, passed, exact, detail });
    }
}

fn le_with<S: Scalar>(a: &S, b: &S, rel: f64) -> bool {
    if S::EXACT {
        a <= b
    } else {
        let (a, b) = (a.to_f64(), b.to_f64());
        a <= b + rel * b.abs().max(1.0)
    }
}

fn eq_with<S: Scalar>(a: &S, b: &S, rel: f64) -> bool {
    if S::EXACT {
        a == b
    } else {
        let (a, b) = (a.to_f64(), b.to_f64());
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
    }
}

fn random_coords<S: Scalar>(dim: usize, seed: u64, trial: u64) -> Vec<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    (0..dim)
        .map(|_| {
            let num: i64 = rng.gen_range(-16..=16);
            let den: u64 = rng.gen_range(1..=8);
            S::from_frac(num, den)
        })
        .collect()
}

/// Re-checks every claim a witness makes and reports each clause.
///
/// The isometry identity is tested on all standard basis vectors and on
/// `options.trials` seeded random coordinate vectors; with rational scalars and an
/// integer exponent every comparison except those involving rescaled approximants
/// is exact.
pub fn verify_certificate<S: Scalar>(w: &ApproximationWitness<S>, options: &VerifyOptions) -> Verdict {
    let mut ck = Checker { reports: Vec::new() };
    let tols = &options.tolerances;
    let p = w.p();
    let exact = S::EXACT && p.as_integer().is_some();

    if options.require_exact {
        ck.record(
            Clause::ExactArithmetic,
            exact,
            if exact {
                Ok("rational scalars with integer exponent".into())
            } else {
                Err(format!("exact arithmetic unavailable (rational scalars: {}, p = {p})", S::EXACT))
            },
        );
    }

    let structural = check_structure(w);
    let structure_ok = structural.is_ok();
    ck.record(Clause::Structure, true, structural);
    if !structure_ok {
        return finish(ck);
    }

    ck.record(Clause::CellDisjointness, true, check_disjoint(w));
    ck.record(Clause::Partition, exact, check_partition(w, tols.relative));

    let dim = w.dimension();
    let atoms = w.space().len();
    ck.record(
        Clause::DimensionBound,
        true,
        if BigUint::from(dim) <= w.dim_bound && dim <= atoms {
            Ok(format!("{dim} cells <= min({}, {atoms})", w.dim_bound))
        } else {
            Err(format!("{dim} cells exceeds min({}, {atoms})", w.dim_bound))
        },
    );

    ck.record(Clause::Isometry, exact, check_isometry(w, options));
    ck.record(Clause::AtomwiseError, exact, check_atomwise(w, tols.relative));
    ck.record(Clause::ErrorBound, exact, check_error(w, tols));
    ck.record(Clause::NormBound, exact, check_norms(w, tols));
    ck.record(Clause::CoordinateRange, false, check_coordinate_range(w, tols.bound));
    finish(ck)
}

fn finish(ck: Checker) -> Verdict {
    let first_failure = ck.reports.iter().find(|r| !r.passed).map(|r| r.clause);
    Verdict { passed: first_failure.is_none(), first_failure, clauses: ck.reports }
}

fn check_structure<S: Scalar>(w: &ApproximationWitness<S>) -> std::result::Result<String, String> {
    let n = w.inputs.len();
    if n == 0 {
        return Err("no inputs".into());
    }
    if w.n_grid == 0 {
        return Err("N = 0".into());
    }
    let space = w.space();
    if w.inputs.iter().any(|f| f.check_same_space(&w.inputs[0]).is_err()) {
        return Err("inputs on different spaces".into());
    }
    let c = &w.certificate;
    let d = c.basis.len();
    if c.cells.len() != d || c.weights.len() != d {
        return Err(format!("{} cells, {} basis functions, {} weights", c.cells.len(), d, c.weights.len()));
    }
    if c.basis.iter().any(|z| z.check_same_space(&w.inputs[0]).is_err()) {
        return Err("basis function on a different space".into());
    }
    if w.coords.len() != n || w.scales.len() != n || w.coords.iter().any(|r| r.len() != d) {
        return Err("coordinate table does not match inputs × basis".into());
    }
    for cell in &c.cells {
        if cell.label.len() != n {
            return Err("cell label length differs from input count".into());
        }
        if cell.atoms.is_empty() || cell.atoms.iter().any(|&a| a >= space.len()) {
            return Err("cell with no atoms or an out-of-range atom".into());
        }
    }
    if w.scales.iter().flatten().any(|a| !a.is_finite() || *a <= 0.0) {
        return Err("non-positive rescaling factor".into());
    }
    Ok(format!("{n} inputs, {d} basis functions"))
}

fn check_disjoint<S: Scalar>(w: &ApproximationWitness<S>) -> std::result::Result<String, String> {
    let mut owner = vec![None; w.space().len()];
    for (l, cell) in w.certificate.cells.iter().enumerate() {
        for &a in &cell.atoms {
            if let Some(prev) = owner[a] {
                return Err(format!("atom {a} in cells {prev} and {l}"));
            }
            owner[a] = Some(l);
        }
        let z = &w.certificate.basis[l];
        for (a, v) in z.values().iter().enumerate() {
            if !v.is_zero() && !cell.atoms.contains(&a) {
                return Err(format!("basis function {l} nonzero outside its cell at atom {a}"));
            }
        }
    }
    Ok(format!("{} pairwise disjoint cells", w.certificate.cells.len()))
}

fn check_partition<S: Scalar>(w: &ApproximationWitness<S>, rel: f64) -> std::result::Result<String, String> {
    let partition = partition_labels(&w.inputs, w.base_grid()).map_err(|e| e.to_string())?;
    let expected = partition.support_cells();
    if expected.len() != w.certificate.cells.len() {
        return Err(format!(
            "recomputed partition has {} support cells, certificate has {}",
            expected.len(),
            w.certificate.cells.len()
        ));
    }
    for (l, (got, want)) in w.certificate.cells.iter().zip(&expected).enumerate() {
        if got != want {
            return Err(format!("cell {l} differs from the recomputed partition"));
        }
        let z = &w.certificate.basis[l];
        for &a in &got.atoms {
            if !eq_with(&z.values()[a], &partition.phi().values()[a], rel) {
                return Err(format!("basis function {l} differs from φ at atom {a}"));
            }
        }
    }
    Ok("cells and basis match the labelled partition".into())
}

fn check_isometry<S: Scalar>(w: &ApproximationWitness<S>, options: &VerifyOptions) -> std::result::Result<String, String> {
    let c = &w.certificate;
    let d = c.dimension();
    let rel = options.tolerances.relative;
    if let Some(l) = c.weights.iter().position(|x| !x.is_positive()) {
        return Err(format!("weight {l} is not positive"));
    }
    let space = w.space();
    let check = |coords: &[S]| -> std::result::Result<(), String> {
        let lhs = c
            .combine(space, coords)
            .and_then(|f| f.lp_norm_pow(c.p))
            .map_err(|e| e.to_string())?;
        let rhs = c.weighted_pow(coords).map_err(|e| e.to_string())?;
        if eq_with(&lhs, &rhs, rel) {
            Ok(())
        } else {
            Err(format!("‖Σλz‖^p = {} but Σ|λ|^p w = {}", lhs.to_f64(), rhs.to_f64()))
        }
    };
    for l in 0..d {
        let mut e = vec![S::zero(); d];
        e[l] = S::one();
        check(&e).map_err(|m| format!("basis vector {l}: {m}"))?;
    }
    let failure = (0..options.trials as u64)
        .into_par_iter()
        .map(|t| (t, check(&random_coords::<S>(d, options.seed, t))))
        .filter_map(|(t, r)| r.err().map(|m| (t, m)))
        .min_by_key(|(t, _)| *t);
    match failure {
        Some((t, m)) => Err(format!("trial {t}: {m}")),
        None => Ok(format!("{d} basis vectors and {} random vectors", options.trials)),
    }
}

fn check_atomwise<S: Scalar>(w: &ApproximationWitness<S>, rel: f64) -> std::result::Result<String, String> {
    let m = grid_size(w.n(), w.base_grid()).map_err(|e| e.to_string())?;
    let mut phi = SimpleFunction::zero(w.space().clone());
    for f in &w.inputs {
        phi = phi.add(&f.pointwise_abs()).map_err(|e| e.to_string())?;
    }
    let inv_m = S::from_frac(1, m);
    for i in 0..w.n() {
        let y = w.raw_approximant(i).map_err(|e| e.to_string())?;
        for (a, ((x, y), ph)) in w.inputs[i].values().iter().zip(y.values()).zip(phi.values()).enumerate() {
            let diff = (x.clone() - y.clone()).abs();
            if !le_with(&diff, &(ph.clone() * inv_m.clone()), rel) {
                return Err(format!("input {i}, atom {a}: |x - y| exceeds φ/(nN)"));
            }
        }
    }
    Ok(format!("|x_i - y_i| <= φ/{m} at every atom"))
}

fn check_error<S: Scalar>(w: &ApproximationWitness<S>, tols: &tol::Tolerances) -> std::result::Result<String, String> {
    let p = w.p();
    let bound = 1.0 / w.n_grid as f64;
    for i in 0..w.n() {
        match w.scales[i] {
            None => {
                let pow = w
                    .raw_approximant(i)
                    .and_then(|y| w.inputs[i].sub(&y))
                    .and_then(|d| d.lp_norm_pow(p))
                    .map_err(|e| e.to_string())?;
                if !le_with(&pow, &w.error_bound_pow, tols.relative) {
                    return Err(format!("input {i}: ‖x - y‖^p = {} > N^-p", pow.to_f64()));
                }
            }
            Some(_) => {
                let err = w
                    .approximant(i)
                    .and_then(|y| w.inputs[i].to_f64().sub(&y))
                    .and_then(|d| d.lp_norm(p))
                    .map_err(|e| e.to_string())?;
                if err > bound + tols.bound {
                    return Err(format!("input {i}: ‖x - y‖ = {err} > 1/N = {bound}"));
                }
            }
        }
    }
    Ok(format!("‖x_i - y_i‖ <= 1/{}", w.n_grid))
}

fn check_norms<S: Scalar>(w: &ApproximationWitness<S>, tols: &tol::Tolerances) -> std::result::Result<String, String> {
    let p = w.p();
    if w.mode == Mode::Plain {
        return Ok("no norm constraint on approximants".into());
    }
    for i in 0..w.n() {
        match (w.mode, w.scales[i]) {
            (Mode::Unit, _) => {
                let norm = w.approximant(i).and_then(|y| y.lp_norm(p)).map_err(|e| e.to_string())?;
                if (norm - 1.0).abs() > tols.bound {
                    return Err(format!("approximant {i} has norm {norm}, expected 1"));
                }
            }
            (_, None) => {
                let pow = w.raw_approximant(i).and_then(|y| y.lp_norm_pow(p)).map_err(|e| e.to_string())?;
                if !le_with(&pow, &S::one(), tols.relative) {
                    return Err(format!("approximant {i} has ‖y‖^p = {}", pow.to_f64()));
                }
            }
            (_, Some(_)) => {
                let norm = w.approximant(i).and_then(|y| y.lp_norm(p)).map_err(|e| e.to_string())?;
                if norm > 1.0 + tols.bound {
                    return Err(format!("approximant {i} has norm {norm} > 1"));
                }
            }
        }
    }
    Ok(match w.mode {
        Mode::Unit => "‖y_i‖ = 1".into(),
        _ => "‖y_i‖ <= 1".into(),
    })
}

fn check_coordinate_range<S: Scalar>(w: &ApproximationWitness<S>, bound_tol: f64) -> std::result::Result<String, String> {
    let mut max_unit = 0.0f64;
    let mut max_raw = 0.0f64;
    for i in 0..w.n() {
        let alpha = w.scales[i].unwrap_or(1.0);
        for c in &w.coords[i] {
            max_raw = max_raw.max(alpha * c.to_f64().abs());
        }
        for c in w.unit_coords(i) {
            max_unit = max_unit.max(c.abs());
        }
    }
    if max_unit > 1.0 + bound_tol {
        return Err(format!("unit-basis coordinate of size {max_unit}"));
    }
    if w.mode != Mode::Unit && max_raw > 1.0 + bound_tol {
        return Err(format!("coordinate of size {max_raw}"));
    }
    Ok(format!("max |λ| = {max_raw}, max unit-basis |λ| = {max_unit}"))
}

/// Coordinate map of the rescaled basis, `e_l ↦ z_l/‖z_l‖`, read back through the
/// certified weights: a diagonal matrix with entries `w_l^{1/p} / ‖z_l‖`.
///
/// For a sound certificate this is the identity.
pub fn basis_map_matrix<S: Scalar>(c: &LpBasisCertificate<S>) -> Result<Vec<Vec<f64>>> {
    let d = c.dimension();
    let mut m = vec![vec![0.0; d]; d];
    for l in 0..d {
        let norm = c.basis[l].lp_norm(c.p)?;
        if norm <= 0.0 {
            return Err(Error::Singular);
        }
        m[l][l] = c.p.root(c.weights[l].to_f64()) / norm;
    }
    Ok(m)
}

impl ApproximationWitness<BigRational> {
    /// Whether the witness contains no floating rescaling at all.
    pub fn all_rational(&self) -> bool {
        self.scales.iter().all(Option::is_none)
    }
}
