//! Degree-truncated Lie closure with replayable certificates.
//!
//! Starting from named generators, every new basis element is bracketed
//! with every older one (oldest partner first); results are normalized by
//! the algebra (rank-one reduction, constants dropped, ...), discarded if
//! their degree exceeds `budget + slack`, and kept when linearly independent
//! of the current basis. Independence is decided in a modular image
//! (`n` specialized to a random residue modulo a 61-bit prime); membership
//! answers are confirmed by an exact fraction-free solve over `Q[n]` and
//! an exact check of the resulting identity.
//!
//! Brackets of one batch may be computed in parallel, insertion is serial in
//! batch order, so the basis and certificates do not depend on the number
//! of threads.

pub mod cert;
pub mod echelon;
mod recon;
pub mod solve;
mod trace_alg;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::lincomb::LinComb;
use crate::modp;
use crate::npoly::NPoly;

pub use cert::{CertParseError, Certificate};
pub use echelon::{Echelon, SparseVec};
pub use solve::{bareiss_solve, FractionFreeSolution};

/// Largest system handed to elimination over `Q[n]` when modular lifting
/// does not produce a verified solution.
const BAREISS_LIMIT: usize = 48;
pub use trace_alg::{all_trace_words, enumerate_products, sorted_trace_words, GeneratorSet, Mode, TraceAlgebra};

/// Grading label of a homogeneous component.
pub type Grade = Vec<i64>;

/// The operations the closure engine needs from a Poisson algebra with a
/// monomial basis.
pub trait ClosureAlgebra: Send + Sync {
    type Key: Clone + Ord + Hash + Send + Sync + fmt::Debug;

    /// The bracket followed by normalization.
    fn bracket(&self, f: &LinComb<Self::Key>, g: &LinComb<Self::Key>) -> LinComb<Self::Key>;

    /// Brings a generator into the normal form used by the basis.
    fn normalize(&self, f: &LinComb<Self::Key>) -> LinComb<Self::Key>;

    /// Validates a membership target, returning the form compared against
    /// the span.
    fn check_target(&self, f: &LinComb<Self::Key>) -> Result<LinComb<Self::Key>, ClosureError>;

    fn key_degree(&self, k: &Self::Key) -> usize;

    /// Multi-grading preserved by the bracket up to [`ClosureAlgebra::bracket_grade`].
    fn grade(&self, k: &Self::Key) -> Grade;

    fn bracket_grade(&self, a: &Grade, b: &Grade) -> Grade;

    /// Number of basis monomials of each grade with degree at most
    /// `max_degree`, when cheap to enumerate. Lets the engine skip pairs
    /// landing in components that are already full.
    fn component_sizes(&self, _max_degree: usize) -> Option<HashMap<Grade, usize>> {
        None
    }

    fn render(&self, f: &LinComb<Self::Key>) -> String;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosureError {
    #[error("basis dimension {dimension} passed the cap {cap}; lower the budget or raise the cap")]
    BudgetExceeded { dimension: usize, cap: usize },
    #[error("target is not in the normal form of {mode} mode: {detail}")]
    ModeMismatch { mode: String, detail: String },
    #[error("budget {budget} is below the largest generator degree {max_degree}")]
    BudgetTooSmall { budget: usize, max_degree: usize },
    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),
    #[error("coefficient denominator vanishes modulo the working prime")]
    UnluckyPrime,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("unresolved leaf `{0}`")]
    UnresolvedLeaf(String),
    #[error("combination is not divisible by its denominator")]
    NotDivisible,
    #[error("replayed value differs from the claimed value")]
    Mismatch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureConfig {
    /// Nominal degree budget; membership targets above it are not found.
    pub budget: usize,
    /// Extra degree allowed for intermediate elements.
    pub slack: usize,
    pub dimension_cap: usize,
    /// Worker threads for bracket batches; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Seeds the choice of the modular evaluation point.
    pub seed: u64,
}

impl ClosureConfig {
    pub fn new(budget: usize, slack: usize) -> Self {
        ClosureConfig { budget, slack, dimension_cap: 20_000, threads: None, seed: 0x5eed }
    }

    pub fn effective_budget(&self) -> usize {
        self.budget + self.slack
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClosureStats {
    pub pairs_bracketed: u64,
    pub pairs_pruned_by_degree: u64,
    pub pairs_in_full_components: u64,
    pub zero_results: u64,
    pub over_budget_results: u64,
    pub dependent_results: u64,
}

#[derive(Clone, Debug)]
pub struct BasisElement<K: Ord> {
    pub value: LinComb<K>,
    pub certificate: Arc<Certificate>,
    pub degree: usize,
    pub grade: Grade,
}

#[derive(Clone, Debug)]
pub enum Membership {
    Member(Arc<Certificate>),
    NotFound,
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }
}

pub struct ClosureState<A: ClosureAlgebra> {
    algebra: A,
    config: ClosureConfig,
    leaves: BTreeMap<String, LinComb<A::Key>>,
    basis: Vec<BasisElement<A::Key>>,
    components: BTreeMap<Grade, Echelon>,
    columns: HashMap<A::Key, usize>,
    point: u64,
    graded: bool,
    sizes: Option<HashMap<Grade, usize>>,
    stats: ClosureStats,
}

fn poly_degree<A: ClosureAlgebra>(alg: &A, f: &LinComb<A::Key>) -> usize {
    f.keys().map(|k| alg.key_degree(k)).max().unwrap_or(0)
}

impl<A: ClosureAlgebra> ClosureState<A> {
    pub fn algebra(&self) -> &A {
        &self.algebra
    }

    pub fn config(&self) -> &ClosureConfig {
        &self.config
    }

    pub fn basis(&self) -> &[BasisElement<A::Key>] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn stats(&self) -> &ClosureStats {
        &self.stats
    }

    pub fn is_graded(&self) -> bool {
        self.graded
    }

    /// Normalized generator values by name.
    pub fn leaves(&self) -> &BTreeMap<String, LinComb<A::Key>> {
        &self.leaves
    }

    /// Basis size per degree.
    pub fn dimension_by_degree(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for b in &self.basis {
            *out.entry(b.degree).or_insert(0) += 1;
        }
        out
    }

    fn element_grade(&self, f: &LinComb<A::Key>) -> Option<Grade> {
        if !self.graded {
            return Some(Grade::new());
        }
        let mut it = f.keys().map(|k| self.algebra.grade(k));
        let g = it.next()?;
        it.all(|h| h == g).then_some(g)
    }

    fn grade_of_pair(&self, a: &Grade, b: &Grade) -> Grade {
        if self.graded {
            self.algebra.bracket_grade(a, b)
        } else {
            Grade::new()
        }
    }

    fn modular_image(&mut self, f: &LinComb<A::Key>) -> Result<SparseVec, ClosureError> {
        let mut v = SparseVec::new();
        for (k, c) in f.iter() {
            let next = self.columns.len();
            let col = *self.columns.entry(k.clone()).or_insert(next);
            let x = c.eval_mod(self.point).ok_or(ClosureError::UnluckyPrime)?;
            if x != 0 {
                v.insert(col, x);
            }
        }
        Ok(v)
    }

    fn component_full(&self, grade: &Grade) -> bool {
        let Some(sizes) = &self.sizes else { return false };
        let size = sizes.get(grade).copied().unwrap_or(0);
        let rank = self.components.get(grade).map_or(0, Echelon::rank);
        rank >= size
    }

    /// Inserts `value` if independent; returns whether it was.
    fn try_insert(
        &mut self,
        value: LinComb<A::Key>,
        certificate: Arc<Certificate>,
    ) -> Result<bool, ClosureError> {
        if value.is_zero() {
            self.stats.zero_results += 1;
            return Ok(false);
        }
        let degree = poly_degree(&self.algebra, &value);
        if degree > self.config.effective_budget() {
            self.stats.over_budget_results += 1;
            return Ok(false);
        }
        let grade = self.element_grade(&value).expect("bracket of homogeneous elements is homogeneous");
        let image = self.modular_image(&value)?;
        let id = self.basis.len();
        let independent = self.components.entry(grade.clone()).or_default().insert(image, id);
        if !independent {
            self.stats.dependent_results += 1;
            return Ok(false);
        }
        self.basis.push(BasisElement { value, certificate, degree, grade });
        if self.basis.len() > self.config.dimension_cap {
            return Err(ClosureError::BudgetExceeded { dimension: self.basis.len(), cap: self.config.dimension_cap });
        }
        Ok(true)
    }

    fn run(&mut self) -> Result<(), ClosureError> {
        let limit = self.config.effective_budget();
        let mut k = 0;
        while k < self.basis.len() {
            let dk = self.basis[k].degree;
            let gk = self.basis[k].grade.clone();
            let mut partners = Vec::new();
            for j in 0..k {
                let b = &self.basis[j];
                if dk + b.degree < 2 || dk + b.degree - 2 > limit {
                    self.stats.pairs_pruned_by_degree += 1;
                    continue;
                }
                if self.component_full(&self.grade_of_pair(&gk, &b.grade)) {
                    self.stats.pairs_in_full_components += 1;
                    continue;
                }
                partners.push(j);
            }
            self.stats.pairs_bracketed += partners.len() as u64;
            let alg = &self.algebra;
            let basis = &self.basis;
            let results: Vec<LinComb<A::Key>> =
                partners.par_iter().map(|&j| alg.bracket(&basis[k].value, &basis[j].value)).collect();
            for (j, value) in partners.into_iter().zip(results) {
                let cert = Certificate::bracket(&self.basis[k].certificate, &self.basis[j].certificate);
                self.try_insert(value, cert)?;
            }
            k += 1;
        }
        Ok(())
    }

    /// Decides whether `target` lies in the span of the basis; a found
    /// certificate expresses it exactly as a `Q(n)`-combination of basis
    /// certificates.
    pub fn membership(&self, target: &LinComb<A::Key>) -> Result<Membership, ClosureError> {
        let t = self.algebra.check_target(target)?;
        if t.is_zero() {
            return Ok(Membership::Member(Certificate::combination(Vec::new(), NPoly::one())));
        }
        if poly_degree(&self.algebra, &t) > self.config.budget {
            return Ok(Membership::NotFound);
        }
        let mut parts: BTreeMap<Grade, LinComb<A::Key>> = BTreeMap::new();
        for (k, c) in t.iter() {
            let g = if self.graded { self.algebra.grade(k) } else { Grade::new() };
            parts.entry(g).or_default().add_term(k.clone(), c.clone());
        }
        let mut terms: Vec<(NPoly, usize)> = Vec::new();
        let mut denominators: Vec<(Vec<(NPoly, usize)>, NPoly)> = Vec::new();
        for (grade, part) in &parts {
            let Some(ech) = self.components.get(grade) else { return Ok(Membership::NotFound) };
            let mut v = SparseVec::new();
            for (k, c) in part.iter() {
                let Some(&col) = self.columns.get(k) else { return Ok(Membership::NotFound) };
                let x = c.eval_mod(self.point).ok_or(ClosureError::UnluckyPrime)?;
                if x != 0 {
                    v.insert(col, x);
                }
            }
            let Some(coords) = ech.express(v) else { return Ok(Membership::NotFound) };
            let support: Vec<usize> = coords.keys().copied().collect();
            let Some(sol) = self.exact_solve(part, &support)? else { return Ok(Membership::NotFound) };
            let combo: Vec<(NPoly, usize)> = sol.numerators.into_iter().zip(support).filter(|(c, _)| !c.is_zero()).collect();
            if sol.denominator.is_one() {
                terms.extend(combo);
            } else {
                denominators.push((combo, sol.denominator));
            }
        }
        let cert_of = |combo: Vec<(NPoly, usize)>, den: NPoly| {
            if den.is_one() && combo.len() == 1 && combo[0].0.is_one() {
                return self.basis[combo[0].1].certificate.clone();
            }
            Certificate::combination(
                combo.into_iter().map(|(c, i)| (c, self.basis[i].certificate.clone())).collect(),
                den,
            )
        };
        if denominators.is_empty() {
            return Ok(Membership::Member(cert_of(terms, NPoly::one())));
        }
        let mut pieces: Vec<(NPoly, Arc<Certificate>)> = Vec::new();
        if !terms.is_empty() {
            pieces.push((NPoly::one(), cert_of(terms, NPoly::one())));
        }
        for (combo, den) in denominators {
            pieces.push((NPoly::one(), cert_of(combo, den)));
        }
        Ok(Membership::Member(Certificate::combination(pieces, NPoly::one())))
    }

    /// Exact coefficients of `target` over the basis elements in `support`,
    /// checked against every monomial.
    fn exact_solve(
        &self,
        target: &LinComb<A::Key>,
        support: &[usize],
    ) -> Result<Option<FractionFreeSolution>, ClosureError> {
        let s = support.len();
        let mut rows: Vec<A::Key> = target.keys().cloned().collect();
        for &i in support {
            rows.extend(self.basis[i].value.keys().cloned());
        }
        rows.sort();
        rows.dedup();
        // Pick `s` monomials whose rows are independent modulo the prime.
        let mut picker = Echelon::new();
        let mut chosen = Vec::with_capacity(s);
        for (r, key) in rows.iter().enumerate() {
            let mut v = SparseVec::new();
            for (pos, &i) in support.iter().enumerate() {
                if let Some(c) = self.basis[i].value.coeff(key) {
                    let x = c.eval_mod(self.point).ok_or(ClosureError::UnluckyPrime)?;
                    if x != 0 {
                        v.insert(pos, x);
                    }
                }
            }
            if !v.is_empty() && picker.insert(v, r) {
                chosen.push(r);
                if chosen.len() == s {
                    break;
                }
            }
        }
        if chosen.len() < s {
            return Ok(None);
        }
        let coeff = |f: &LinComb<A::Key>, key: &A::Key| f.coeff(key).cloned().unwrap_or_else(NPoly::zero);
        let a: Vec<Vec<NPoly>> =
            chosen.iter().map(|&r| support.iter().map(|&i| coeff(&self.basis[i].value, &rows[r])).collect()).collect();
        let b: Vec<NPoly> = chosen.iter().map(|&r| coeff(target, &rows[r])).collect();
        let verify = |sol: &FractionFreeSolution| {
            let mut lhs = LinComb::zero();
            for (c, &i) in sol.numerators.iter().zip(support) {
                lhs.add_scaled(&self.basis[i].value, c);
            }
            lhs == target.scale(&sol.denominator)
        };
        if let Some(sol) = recon::lift_solution(&a, &b, self.point, verify) {
            return Ok(Some(sol));
        }
        if s > BAREISS_LIMIT {
            return Ok(None);
        }
        let Some(sol) = bareiss_solve(&a, &b) else { return Ok(None) };
        Ok(verify(&sol).then_some(sol))
    }

    /// Replays one certificate against this state's generators and algebra.
    pub fn replay(&self, cert: &Arc<Certificate>) -> Result<LinComb<A::Key>, ReplayError> {
        replay(&self.algebra, &self.leaves, cert)
    }

    /// Replays every basis certificate (sharing work across the DAG) and
    /// compares with the stored values.
    pub fn verify_certificates(&self) -> Result<(), (usize, ReplayError)> {
        let mut memo = HashMap::new();
        for (i, b) in self.basis.iter().enumerate() {
            let v = replay_memo(&self.algebra, &self.leaves, &b.certificate, &mut memo).map_err(|e| (i, e))?;
            if v != b.value {
                return Err((i, ReplayError::Mismatch));
            }
        }
        Ok(())
    }
}

/// Builds the degree-truncated closure of `generators`.
pub fn closure<A: ClosureAlgebra>(
    algebra: A,
    generators: &[(String, LinComb<A::Key>)],
    config: ClosureConfig,
) -> Result<ClosureState<A>, ClosureError> {
    let max_degree = generators.iter().map(|(_, g)| poly_degree(&algebra, g)).max().unwrap_or(0);
    if max_degree > config.effective_budget() {
        return Err(ClosureError::BudgetTooSmall { budget: config.budget, max_degree });
    }
    let mut leaves = BTreeMap::new();
    let mut normalized = Vec::with_capacity(generators.len());
    for (name, g) in generators {
        let v = algebra.normalize(g);
        if leaves.insert(name.clone(), v.clone()).is_some() {
            return Err(ClosureError::DuplicateName(name.clone()));
        }
        normalized.push((name.clone(), v));
    }
    let graded = normalized.iter().all(|(_, g)| {
        let mut it = g.keys().map(|k| algebra.grade(k));
        match it.next() {
            Some(first) => it.all(|h| h == first),
            None => true,
        }
    });
    let sizes = if graded { algebra.component_sizes(config.effective_budget()) } else { None };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let point = rng.gen_range(1u64 << 32..modp::P);
    let mut state = ClosureState {
        algebra,
        config: config.clone(),
        leaves,
        basis: Vec::new(),
        components: BTreeMap::new(),
        columns: HashMap::new(),
        point,
        graded,
        sizes,
        stats: ClosureStats::default(),
    };
    for (name, g) in normalized {
        state.try_insert(g, Certificate::leaf(&name))?;
    }
    match config.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .expect("thread pool");
            pool.install(|| state.run())?;
        }
        None => state.run()?,
    }
    Ok(state)
}

/// Recomputes the value of `cert` from named leaves.
pub fn replay<A: ClosureAlgebra>(
    algebra: &A,
    leaves: &BTreeMap<String, LinComb<A::Key>>,
    cert: &Arc<Certificate>,
) -> Result<LinComb<A::Key>, ReplayError> {
    replay_memo(algebra, leaves, cert, &mut HashMap::new())
}

fn replay_memo<A: ClosureAlgebra>(
    algebra: &A,
    leaves: &BTreeMap<String, LinComb<A::Key>>,
    cert: &Arc<Certificate>,
    memo: &mut HashMap<*const Certificate, LinComb<A::Key>>,
) -> Result<LinComb<A::Key>, ReplayError> {
    if let Some(v) = memo.get(&Arc::as_ptr(cert)) {
        return Ok(v.clone());
    }
    let value = match &**cert {
        Certificate::Leaf(name) => {
            algebra.normalize(leaves.get(name).ok_or_else(|| ReplayError::UnresolvedLeaf(name.clone()))?)
        }
        Certificate::Bracket(a, b) => {
            let va = replay_memo(algebra, leaves, a, memo)?;
            let vb = replay_memo(algebra, leaves, b, memo)?;
            algebra.bracket(&va, &vb)
        }
        Certificate::Combination { terms, denominator } => {
            let mut acc = LinComb::zero();
            for (c, child) in terms {
                acc.add_scaled(&replay_memo(algebra, leaves, child, memo)?, c);
            }
            acc.exact_div(denominator).ok_or(ReplayError::NotDivisible)?
        }
    };
    memo.insert(Arc::as_ptr(cert), value.clone());
    Ok(value)
}

/// Replays `cert` and compares with `claim`.
pub fn check_certificate<A: ClosureAlgebra>(
    algebra: &A,
    leaves: &BTreeMap<String, LinComb<A::Key>>,
    cert: &Arc<Certificate>,
    claim: &LinComb<A::Key>,
) -> Result<(), ReplayError> {
    let v = replay(algebra, leaves, cert)?;
    if &v == claim {
        Ok(())
    } else {
        Err(ReplayError::Mismatch)
    }
}
