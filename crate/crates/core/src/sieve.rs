//! Sieve instances over trace-function values: the ideal set `Λ_L`, local
//! sets `A_λ`, survivors, `P(L)` and the bound `(1 + L^B/√q)/P(L)`.

use std::collections::HashMap;
use std::str::FromStr;

use bitvec::prelude::*;
use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, gcd, inv_mod_prime};
use crate::cache::{self, TraceCache};
use crate::cyclotomic::{self, trace_order, CongruenceCondition, CyclotomicError, PrimeIdealDeg1};
use crate::field::{FieldError, FiniteField};
use crate::formula::{self, FormulaError};
use crate::groups::{self, GroupError, GroupFamily, GroupSpec, TraceHistogram, DEFAULT_GROUP_CAP};
use crate::intpoly::IntPoly;
use crate::local_set::{self, LocalSet};
use crate::trace::{self, Embedding, ExpSumSpec, Family, TraceError, TraceTable, TraceValue};

#[derive(Debug, Error)]
pub enum SieveError {
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
    #[error("EmptyLambda: no ideal of norm <= {bound}; Chebotarev lower envelope {expected:.3}")]
    EmptyLambda { bound: u64, expected: f64 },
    #[error("LocalDensityOne(ell={0})")]
    LocalDensityOne(u64),
    #[error("UnsafeFormula: {0}")]
    UnsafeFormula(String),
    #[error("ZeroPL")]
    ZeroPL,
    #[error("TableMismatch: {0}")]
    TableMismatch(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Cyclotomic(#[from] CyclotomicError),
}

/// The global set `A` whose reductions are the local sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetSet {
    MthPowers { m: u64 },
    PolynomialImage { f: IntPoly },
    Formula { text: String },
    ExplicitList { values: Vec<i64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupChoice {
    pub family: GroupFamily,
    pub n: usize,
}

fn default_true() -> bool {
    true
}

fn default_cap() -> u64 {
    DEFAULT_GROUP_CAP
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SieveConfig {
    pub family: Family,
    pub p: u64,
    pub e: u32,
    pub target: TargetSet,
    /// Explicit `L`; `⌊q^{1/(2B)}⌋` when absent.
    #[serde(default)]
    pub bound: Option<u64>,
    /// Extra condition on `ℓ`; m-th powers default to `ℓ ≡ 1 (mod m')`.
    #[serde(default)]
    pub condition: Option<CongruenceCondition>,
    #[serde(default = "default_true")]
    pub normalized: bool,
    /// Monodromy group; inferred for the standard families when absent.
    #[serde(default)]
    pub group: Option<GroupChoice>,
    #[serde(default = "default_cap")]
    pub group_cap: u64,
}

impl SieveConfig {
    pub fn new(family: Family, p: u64, e: u32, target: TargetSet) -> Self {
        SieveConfig {
            family,
            p,
            e,
            target,
            bound: None,
            condition: None,
            normalized: true,
            group: None,
            group_cap: DEFAULT_GROUP_CAP,
        }
    }

    pub fn with_bound(mut self, bound: u64) -> Self {
        self.bound = Some(bound);
        self
    }

    pub fn q(&self) -> Result<u64, SieveError> {
        arith::checked_pow(self.p, self.e).ok_or_else(|| SieveError::InvalidConfig("q overflows".into()))
    }
}

/// Monodromy group of the standard families: `Kl_n` gives `Sp_n` (n even)
/// or `SL_n` (n odd); `y² = f(x)(x - z)` with `deg f = 2g` gives `Sp_{2g}`;
/// `Σ_y e(xy + h(y))` with `h` a polynomial of degree `n ≥ 3`, `n ≠ 7, 9`,
/// `a_{n-1} = 0` gives `Sp_{n-1}` (n odd, `h` odd) or `SL_{n-1}`.
pub fn default_group(family: &Family) -> Option<GroupChoice> {
    match family {
        Family::Kloosterman { n } => Some(GroupChoice {
            family: if n % 2 == 0 { GroupFamily::Sp } else { GroupFamily::SL },
            n: *n as usize,
        }),
        Family::Hyperelliptic { f } => {
            let deg = f.degree()?;
            (deg >= 2 && deg % 2 == 0).then_some(GroupChoice {
                family: GroupFamily::Sp,
                n: deg,
            })
        }
        Family::ExpSum(spec) => birch_type_group(spec),
        _ => None,
    }
}

fn birch_type_group(spec: &ExpSumSpec) -> Option<GroupChoice> {
    let f = spec.f.as_polynomial()?;
    let g = spec.g.as_polynomial()?;
    let h = spec.h.as_polynomial()?;
    if f != IntPoly::x() || g != IntPoly::constant(1) || spec.r != 1 {
        return None;
    }
    let n = h.degree()?;
    if n < 3 || n == 7 || n == 9 || h.coeff(n - 1) != 0 {
        return None;
    }
    let symplectic = n % 2 == 1 && (2..=n).step_by(2).all(|i| h.coeff(i) == 0);
    Some(GroupChoice {
        family: if symplectic { GroupFamily::Sp } else { GroupFamily::SL },
        n: n - 1,
    })
}

/// `⌊q^{1/(2B)}⌋`, exactly: the largest `L` with `L^{2a} ≤ q^b` for `B = a/b`.
pub fn default_bound(q: u64, b: Rational64) -> u64 {
    let (num, den) = (*b.numer() as u32, *b.denom() as u32);
    let target = BigUint::from(q).pow(den);
    let fits = |l: u64| BigUint::from(l).pow(2 * num) <= target;
    let mut l = (q as f64).powf(den as f64 / (2.0 * num as f64)).floor() as u64;
    while l > 0 && !fits(l) {
        l -= 1;
    }
    while fits(l + 1) {
        l += 1;
    }
    l
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChebotarevAnnotation {
    pub value: f64,
    /// `L ≥ (d m')^8`.
    pub unconditional_valid: bool,
    /// `L ≥ (d m')^{2+ε}`, only meaningful under GRH.
    pub grh_valid: bool,
}

/// `|C| L / ((d m')^ε φ(m') log L)` with implicit constant 1.
pub fn chebotarev_lower(d: u64, m: u64, classes: u64, bound: u64, eps: f64) -> ChebotarevAnnotation {
    let dm = (d * m) as f64;
    let l = bound as f64;
    let value = classes as f64 * l / (dm.powf(eps) * arith::totient(m) as f64 * l.ln());
    let unconditional_valid = (d as u128 * m as u128)
        .checked_pow(8)
        .is_some_and(|t| bound as u128 >= t);
    ChebotarevAnnotation {
        value,
        unconditional_valid,
        grh_valid: l >= dm.powf(2.0 + eps),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanIdeal {
    pub ideal: PrimeIdealDeg1,
    /// Conjugate ideals represented by this one.
    pub multiplicity: u64,
    pub local_set: LocalSet,
    pub local_density: BigRational,
    /// `|Ω_λ|/|G(F_λ)|`, `Ω_λ = {g : tr g ∉ A_λ}`.
    pub omega_ratio: BigRational,
    /// False when the group was too large and `1 - |A_λ|/ℓ` was used.
    pub omega_exact: bool,
    /// `P(tr g ∈ A_λ)` when exact.
    pub trace_probability: Option<BigRational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SievePlan {
    pub config: SieveConfig,
    pub q: u64,
    pub group: GroupChoice,
    pub b: Rational64,
    pub bound: u64,
    pub condition: Option<CongruenceCondition>,
    pub ideals: Vec<PlanIdeal>,
    /// `Σ_{λ ∈ Λ_L} |Ω_λ|/|G|`, conjugates included.
    pub p_l: BigRational,
    pub p_l_exact: bool,
    pub sup_local_density: BigRational,
}

impl SievePlan {
    pub fn lambda_cardinality(&self) -> u64 {
        self.ideals.iter().map(|i| i.multiplicity).sum()
    }

    /// The plan restricted to its first `k` ideals.
    pub fn truncated(&self, k: usize) -> SievePlan {
        let ideals: Vec<PlanIdeal> = self.ideals[..k].to_vec();
        let p_l = ideals
            .iter()
            .map(|i| &i.omega_ratio * BigRational::from_integer(BigInt::from(i.multiplicity)))
            .fold(BigRational::zero(), |a, b| a + b);
        let sup = ideals
            .iter()
            .map(|i| i.local_density.clone())
            .max()
            .unwrap_or_else(BigRational::zero);
        SievePlan {
            p_l_exact: ideals.iter().all(|i| i.omega_exact),
            ideals,
            p_l,
            sup_local_density: sup,
            ..self.clone()
        }
    }
}

/// Default `(m', {1})` for m-th powers: `m` with the primes of `4p` removed.
fn default_condition(target: &TargetSet, d: u64) -> Option<CongruenceCondition> {
    let TargetSet::MthPowers { m } = target else {
        return None;
    };
    let mut m_prime = *m;
    for r in arith::prime_factors(d) {
        while m_prime % r == 0 {
            m_prime /= r;
        }
    }
    (m_prime > 1).then(|| CongruenceCondition::new(m_prime, vec![1]))
}

fn validate(cfg: &SieveConfig) -> Result<(), SieveError> {
    if !arith::is_prime(cfg.p) {
        return Err(FieldError::NotPrime(cfg.p).into());
    }
    if cfg.e == 0 {
        return Err(SieveError::InvalidConfig("e must be positive".into()));
    }
    cfg.q()?;
    if !matches!(
        cfg.family,
        Family::Kloosterman { .. } | Family::ExpSum(_) | Family::Hyperelliptic { .. }
    ) {
        return Err(SieveError::InvalidConfig(
            "sieve families are kloosterman, exp_sum and hyperelliptic".into(),
        ));
    }
    if let Family::Kloosterman { n } = cfg.family {
        if n == 0 {
            return Err(TraceError::BadRank(n).into());
        }
    }
    match &cfg.target {
        TargetSet::MthPowers { m } => {
            if *m < 2 || gcd(*m, cfg.p) != 1 {
                return Err(SieveError::InvalidConfig(format!(
                    "m = {m} must be at least 2 and coprime to p = {}",
                    cfg.p
                )));
            }
        }
        TargetSet::Formula { text } => {
            let phi = formula::parse_formula(text)?;
            if !phi.reduction_safe() {
                return Err(SieveError::UnsafeFormula(text.clone()));
            }
        }
        _ => {}
    }
    if let Some(c) = &cfg.condition {
        if c.modulus == 0 || gcd(c.modulus, trace_order(cfg.p)) != 1 {
            return Err(SieveError::InvalidConfig(format!(
                "condition modulus {} must be coprime to {}",
                c.modulus,
                trace_order(cfg.p)
            )));
        }
    }
    Ok(())
}

fn local_set_for(target: &TargetSet, ell: u64) -> Result<LocalSet, SieveError> {
    Ok(match target {
        TargetSet::MthPowers { m } => local_set::mth_power_set(ell, *m),
        TargetSet::PolynomialImage { f } => local_set::polynomial_image_set(f, ell),
        TargetSet::Formula { text } => formula::definable_subset_fast(&formula::parse_formula(text)?, ell)?,
        TargetSet::ExplicitList { values } => LocalSet::from_list(ell, values),
    })
}

pub fn build_sieve_plan(cfg: &SieveConfig) -> Result<SievePlan, SieveError> {
    validate(cfg)?;
    let q = cfg.q()?;
    let d = trace_order(cfg.p);
    let group = match cfg.group {
        Some(g) => g,
        None => default_group(&cfg.family).ok_or_else(|| {
            SieveError::InvalidConfig("no default monodromy group for this family; set `group`".into())
        })?,
    };
    let b = groups::sieve_exponent_b(group.family, group.n)?;
    let bound = cfg.bound.unwrap_or_else(|| default_bound(q, b));
    let condition = cfg.condition.clone().or_else(|| default_condition(&cfg.target, d));
    let ideals = cyclotomic::deg1_prime_ideals(d, bound, condition.as_ref())?;
    if ideals.is_empty() {
        let (m, classes) = condition
            .as_ref()
            .map_or((1, 1), |c| (c.modulus, c.classes.len() as u64));
        let expected = chebotarev_lower(d, m, classes, bound.max(2), 0.1).value;
        return Err(SieveError::EmptyLambda { bound, expected });
    }

    let mut histograms: HashMap<u64, Option<TraceHistogram>> = HashMap::new();
    let mut plan_ideals = Vec::with_capacity(ideals.len());
    for ideal in ideals {
        let ell = ideal.ell;
        let a = local_set_for(&cfg.target, ell)?;
        if a.is_full() {
            return Err(SieveError::LocalDensityOne(ell));
        }
        let hist = match histograms.get(&ell) {
            Some(h) => h.clone(),
            None => {
                let h = match GroupSpec::new(group.family, group.n, ell) {
                    Ok(spec) => {
                        let spec = spec.with_cap(cfg.group_cap);
                        groups::histogram_available(&spec)
                            .then(|| groups::trace_histogram(&spec))
                            .transpose()?
                    }
                    Err(GroupError::BadField(_)) => None,
                    Err(e) => return Err(e.into()),
                };
                histograms.insert(ell, h.clone());
                h
            }
        };
        let trace_probability = hist.as_ref().map(|h| groups::prob_trace_in(h, &a)).transpose()?;
        let (omega_ratio, omega_exact) = match &trace_probability {
            Some(pr) => (BigRational::one() - pr, true),
            None => (BigRational::one() - a.density(), false),
        };
        plan_ideals.push(PlanIdeal {
            multiplicity: ideal.multiplicity(),
            ideal,
            local_density: a.density(),
            local_set: a,
            omega_ratio,
            omega_exact,
            trace_probability,
        });
    }
    let plan = SievePlan {
        config: cfg.clone(),
        q,
        group,
        b,
        bound,
        condition,
        ideals: Vec::new(),
        p_l: BigRational::zero(),
        p_l_exact: true,
        sup_local_density: BigRational::zero(),
    };
    let n = plan_ideals.len();
    Ok(SievePlan {
        ideals: plan_ideals,
        ..plan
    }
    .truncated(n))
}

/// `(1 + L^B/√q)/P(L)`.
pub fn theoretical_bound(plan: &SievePlan) -> Result<f64, SieveError> {
    if plan.p_l.is_zero() {
        return Err(SieveError::ZeroPL);
    }
    let b = *plan.b.numer() as f64 / *plan.b.denom() as f64;
    let ratio = (b * (plan.bound as f64).ln() - 0.5 * (plan.q as f64).ln()).exp();
    Ok((1.0 + ratio) / plan.p_l.to_f64().unwrap())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurvivorCount {
    /// Survivors after each ideal, in plan order.
    pub after_each: Vec<u64>,
    pub survivors: u64,
    /// One bit per entry of the tables' common domain.
    pub mask: BitVec,
    pub domain: Vec<u64>,
    pub density: f64,
}

/// Factor `c` with unnormalized value `= c ·` normalized value.
fn unnormalize_factor(t: &TraceTable) -> Result<u64, SieveError> {
    let ell = t.embedding.ideal().unwrap().ell;
    match trace::normalization_factor(&t.family, &t.embedding, t.p, t.e)? {
        TraceValue::Residue(f) => Ok(inv_mod_prime(f, ell).unwrap()),
        TraceValue::Complex(_) => unreachable!("residue embedding"),
    }
}

/// `x` survives when `t(x) mod λ ∈ A_λ` for every ideal. Unnormalized
/// tables are tested against the scaled sets `c·A_λ`.
pub fn survivor_count(plan: &SievePlan, tables: &[TraceTable]) -> Result<SurvivorCount, SieveError> {
    if tables.len() != plan.ideals.len() {
        return Err(SieveError::TableMismatch(format!(
            "{} tables for {} ideals",
            tables.len(),
            plan.ideals.len()
        )));
    }
    let Some(first) = tables.first() else {
        return Err(SieveError::TableMismatch("no tables".into()));
    };
    let domain = first.domain_indices();
    let mut mask = bitvec![1; domain.len()];
    let mut after_each = Vec::with_capacity(tables.len());
    for (t, pi) in tables.iter().zip(&plan.ideals) {
        if t.embedding.ideal() != Some(&pi.ideal) {
            return Err(SieveError::TableMismatch(format!("table is not reduced modulo the ideal above {}", pi.ideal.ell)));
        }
        if t.p != plan.config.p || t.e != plan.config.e || t.domain != first.domain || t.family != first.family {
            return Err(SieveError::TableMismatch("tables disagree on field, family or domain".into()));
        }
        let values = t.residues().unwrap();
        let set = if t.normalized {
            pi.local_set.clone()
        } else {
            pi.local_set.scaled(unnormalize_factor(t)?)
        };
        for (i, &v) in values.iter().enumerate() {
            if mask[i] && !set.contains(v) {
                mask.set(i, false);
            }
        }
        after_each.push(mask.count_ones() as u64);
    }
    let survivors = mask.count_ones() as u64;
    Ok(SurvivorCount {
        after_each,
        survivors,
        density: survivors as f64 / plan.q as f64,
        mask,
        domain,
    })
}

/// The residue table of the configured family modulo one ideal.
pub fn family_table(
    cfg: &SieveConfig,
    field: &FiniteField,
    ideal: &PrimeIdealDeg1,
    cache: Option<&TraceCache>,
) -> Result<TraceTable, SieveError> {
    let emb = Embedding::Residue(ideal.clone());
    let raw = match &cfg.family {
        Family::Kloosterman { n } => cache::kloosterman_table_cached(*n, field, ideal, cache)?,
        Family::ExpSum(spec) => trace::exp_sum_table(spec, field, &emb)?,
        Family::Hyperelliptic { f } => trace::hyperelliptic_table(f, field, &emb)?,
        _ => return Err(SieveError::InvalidConfig("unsupported sieve family".into())),
    };
    Ok(if cfg.normalized { trace::normalize(&raw)? } else { raw })
}

#[derive(Clone, Debug, Serialize)]
pub struct IdealRow {
    pub ell: u64,
    pub omega: u64,
    pub multiplicity: u64,
    pub local_density: [serde_json::Number; 2],
    pub omega_ratio: [serde_json::Number; 2],
    pub omega_exact: bool,
    pub survivors_after: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SieveReport {
    pub version: String,
    pub config: SieveConfig,
    pub q: u64,
    pub group: GroupChoice,
    #[serde(rename = "B")]
    pub b: [i64; 2],
    #[serde(rename = "L")]
    pub bound: u64,
    pub condition: Option<CongruenceCondition>,
    pub ideals: Vec<IdealRow>,
    /// Rational primes in `Λ_L`, one ideal each in the survivor test.
    pub lambda_primes: usize,
    /// `|Λ_L|` with conjugates.
    pub lambda_cardinality: u64,
    #[serde(rename = "PL")]
    pub p_l: [serde_json::Number; 2],
    #[serde(rename = "PL_exact")]
    pub p_l_exact: bool,
    pub sup_local_density: [serde_json::Number; 2],
    pub domain_size: u64,
    pub survivors: u64,
    pub density: f64,
    pub bound_value: f64,
    pub bound_ratio: f64,
    /// `log q / (B q^{1/(2B)})`, envelope with implicit constant 1.
    pub envelope: f64,
    pub chebotarev: ChebotarevAnnotation,
    pub annotations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

pub fn rational_json(r: &BigRational) -> [serde_json::Number; 2] {
    let num = |v: &BigInt| serde_json::Number::from_str(&v.to_string()).unwrap();
    [num(r.numer()), num(r.denom())]
}

fn annotations(plan: &SievePlan) -> Vec<String> {
    let cfg = &plan.config;
    let mut out = vec!["bounds and envelopes use implicit constant 1".to_string()];
    if let Family::Kloosterman { n } = cfg.family {
        let needed = Rational64::from_integer(16) * plan.b;
        if Rational64::from_integer(cfg.e as i64) < needed {
            out.push(format!("hypothesis e >= 16B fails: e = {}, 16B = {needed}", cfg.e));
        }
        out.push("domain is F_q^x; the sheaf's open set U is not modelled".into());
        let orbit = (cfg.p - 1) / gcd(cfg.p - 1, n as u64);
        out.push(format!("Galois orbits of x under c -> c^n x have size {orbit}"));
    }
    if let Family::Hyperelliptic { .. } = cfg.family {
        out.push("domain is the roots z of f in F_q".into());
    }
    if !plan.p_l_exact {
        out.push("P(L) is approximate: groups above the cap use 1 - |A|/ell".into());
    }
    out.push(format!(
        "survivor test uses one ideal per prime; |Lambda_L| = {} counts conjugates",
        plan.lambda_cardinality()
    ));
    out
}

/// End-to-end run: plan, tables, survivors, bound.
pub fn density_report(cfg: &SieveConfig, cache: Option<&TraceCache>) -> Result<(SieveReport, SurvivorCount), SieveError> {
    let plan = build_sieve_plan(cfg)?;
    let field = FiniteField::new(cfg.p, cfg.e)?;
    let tables: Vec<TraceTable> = plan
        .ideals
        .par_iter()
        .map(|pi| family_table(cfg, &field, &pi.ideal, cache))
        .collect::<Result<_, _>>()?;
    let counts = survivor_count(&plan, &tables)?;
    Ok((report_from(&plan, &counts)?, counts))
}

pub fn report_from(plan: &SievePlan, counts: &SurvivorCount) -> Result<SieveReport, SieveError> {
    let bound_value = theoretical_bound(plan)?;
    let b = *plan.b.numer() as f64 / *plan.b.denom() as f64;
    let q = plan.q as f64;
    let d = trace_order(plan.config.p);
    let (m, classes) = plan
        .condition
        .as_ref()
        .map_or((1, 1), |c| (c.modulus, c.classes.len() as u64));
    Ok(SieveReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: plan.config.clone(),
        q: plan.q,
        group: plan.group,
        b: [*plan.b.numer(), *plan.b.denom()],
        bound: plan.bound,
        condition: plan.condition.clone(),
        ideals: plan
            .ideals
            .iter()
            .zip(&counts.after_each)
            .map(|(pi, &after)| IdealRow {
                ell: pi.ideal.ell,
                omega: pi.ideal.omega,
                multiplicity: pi.multiplicity,
                local_density: rational_json(&pi.local_density),
                omega_ratio: rational_json(&pi.omega_ratio),
                omega_exact: pi.omega_exact,
                survivors_after: after,
            })
            .collect(),
        lambda_primes: plan.ideals.len(),
        lambda_cardinality: plan.lambda_cardinality(),
        p_l: rational_json(&plan.p_l),
        p_l_exact: plan.p_l_exact,
        sup_local_density: rational_json(&plan.sup_local_density),
        domain_size: counts.domain.len() as u64,
        survivors: counts.survivors,
        density: counts.density,
        bound_value,
        bound_ratio: counts.density / bound_value,
        envelope: q.ln() / (b * q.powf(1.0 / (2.0 * b))),
        chebotarev: chebotarev_lower(d, m, classes, plan.bound.max(2), 0.1),
        annotations: annotations(plan),
        runtime_ms: None,
    })
}

/// `x_index,survives` per domain entry.
pub fn survivor_mask_csv(counts: &SurvivorCount) -> String {
    let mut s = String::from("x_index,survives\n");
    for (x, bit) in counts.domain.iter().zip(counts.mask.iter()) {
        s.push_str(&format!("{x},{}\n", u8::from(*bit)));
    }
    s
}
