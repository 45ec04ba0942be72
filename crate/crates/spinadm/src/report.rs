//! Verification suites over the whole combinatorial stack, with
//! machine-readable reporting.
//!
//! Each suite re-derives one family of counts or set identities and emits
//! one [`VerificationRecord`] per checked fact. A record carries the claim
//! being checked, the expected and computed values (compared exactly — no
//! tolerances anywhere), a pass/fail/skipped status, and an optional detail
//! string holding witnesses for failures or the reason for a skip.
//!
//! Output is deterministic by construction: records are sorted by a
//! canonical key, the elapsed field is pinned to zero, and all container
//! serialization is order-stable, so repeated runs — at any thread count —
//! produce byte-identical JSON and CSV.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::alcove::{
    admissible_set, double_cosets, double_cosets_stable, facet_vertex_set, saturate_closure,
    DoubleCoset, StabilizerGroup,
};
use crate::error::{Error, Result};
use crate::lift::{build_lift, check_lm_conditions};
use crate::parahoric::{
    conjugacy_class_count_burnside, conjugacy_classes, maximal_classes, xi_group,
};
use crate::permissible::{
    cell_classes, enumerate_perm, enumerate_perm_general, orbit_classify, spin_orbit_member,
    IsoSubset, Sign,
};
use crate::weyl::{validate_rank, AffineElement, TransVec, MAX_ENCODABLE_RANK};

/// The verification suites, in canonical report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    /// Cell-class counts per vertex against the closed forms.
    Cells,
    /// Set equality of permissible and admissible cell classes.
    PermAdm,
    /// The vertexwise intersection criterion for admissible double cosets.
    Vertexwise,
    /// Rank stratification of the cell classes at one vertex.
    Strata,
    /// Generic-fiber lifts of the class representatives.
    Lifts,
    /// Self-dualities of the lattice-chain diagram and their orbits.
    Parahoric,
}

impl Suite {
    /// Every suite, in canonical order.
    pub const ALL: [Suite; 6] = [
        Suite::Cells,
        Suite::PermAdm,
        Suite::Vertexwise,
        Suite::Strata,
        Suite::Lifts,
        Suite::Parahoric,
    ];

    /// Stable lowercase name, used in every output format.
    pub fn name(self) -> &'static str {
        match self {
            Suite::Cells => "cells",
            Suite::PermAdm => "perm-adm",
            Suite::Vertexwise => "vertexwise",
            Suite::Strata => "strata",
            Suite::Lifts => "lifts",
            Suite::Parahoric => "parahoric",
        }
    }

    /// Parse a suite name (hyphen and underscore are interchangeable).
    pub fn parse(s: &str) -> Result<Suite> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == key)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Suite {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// Which index sets the index-set-driven suites should visit.
#[derive(Debug, Clone)]
pub enum IndexSelection {
    /// Every nonempty subset of the chain indices `{0, …, n}`.
    All,
    /// An explicit list of index sets.
    Sets(Vec<BTreeSet<usize>>),
}

/// Configuration for a verification run.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    /// Suites to run (duplicates are merged).
    pub suites: Vec<Suite>,
    /// Half-ranks to verify at.
    pub n_range: Vec<usize>,
    /// Index sets for the suites driven by them (`perm-adm`, `vertexwise`).
    pub index_sets: IndexSelection,
    /// Spin signs to verify.
    pub signs: Vec<Sign>,
    /// Worker threads for the parallel suites (1 = serial).
    pub parallelism: usize,
    /// Unlock the searches that are expensive at higher rank; without it
    /// they are reported as skipped rather than run.
    pub allow_large: bool,
    /// Fault injection: enlarge each admissible set by one spurious
    /// translation before comparing, to demonstrate failure reporting.
    pub mutate_adm: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suites: Suite::ALL.to_vec(),
            n_range: vec![4],
            index_sets: IndexSelection::All,
            signs: Sign::ALL.to_vec(),
            parallelism: 1,
            allow_large: false,
            mutate_adm: false,
        }
    }
}

impl Serialize for SuiteConfig {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        // `parallelism` is deliberately not echoed: the report must be
        // byte-identical however many workers produced it.
        let mut st = serializer.serialize_struct("SuiteConfig", 6)?;
        st.serialize_field("suites", &self.suites)?;
        st.serialize_field("n_range", &self.n_range)?;
        match &self.index_sets {
            IndexSelection::All => st.serialize_field("index_sets", "all")?,
            IndexSelection::Sets(sets) => {
                let lists: Vec<Vec<usize>> =
                    sets.iter().map(|s| s.iter().copied().collect()).collect();
                st.serialize_field("index_sets", &lists)?;
            }
        }
        let signs: Vec<String> = self.signs.iter().map(|s| s.to_string()).collect();
        st.serialize_field("signs", &signs)?;
        st.serialize_field("allow_large", &self.allow_large)?;
        st.serialize_field("mutate_adm", &self.mutate_adm)?;
        st.end()
    }
}

/// The parameters a record was checked at. Only `n` is always present.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct RecordParams {
    /// Half-rank.
    pub n: usize,
    /// Chain index set, where applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index_set: Option<Vec<usize>>,
    /// Spin sign, where applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<String>,
    /// Stratum rank, where applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    /// Class number within a stratum, where applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
}

impl RecordParams {
    /// Parameters carrying only the half-rank.
    pub fn rank(n: usize) -> Self {
        RecordParams { n, index_set: None, sign: None, ell: None, d: None }
    }

    /// Attach a chain index set.
    pub fn with_index(mut self, indices: &BTreeSet<usize>) -> Self {
        self.index_set = Some(indices.iter().copied().collect());
        self
    }

    /// Attach a single chain index.
    pub fn with_vertex(self, i: usize) -> Self {
        self.with_index(&BTreeSet::from([i]))
    }

    /// Attach a spin sign.
    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = Some(sign.to_string());
        self
    }

    /// Attach a stratum rank.
    pub fn with_ell(mut self, ell: usize) -> Self {
        self.ell = Some(ell);
        self
    }

    /// Attach a class number.
    pub fn with_d(mut self, d: usize) -> Self {
        self.d = Some(d);
        self
    }

    fn label(&self) -> String {
        let mut out = format!("n={}", self.n);
        if let Some(ix) = &self.index_set {
            let parts: Vec<String> = ix.iter().map(|i| i.to_string()).collect();
            out.push_str(&format!(" I={{{}}}", parts.join(",")));
        }
        if let Some(s) = &self.sign {
            out.push_str(&format!(" sign={s}"));
        }
        if let Some(ell) = self.ell {
            out.push_str(&format!(" ell={ell}"));
        }
        if let Some(d) = self.d {
            out.push_str(&format!(" d={d}"));
        }
        out
    }
}

/// Outcome of a single check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Expected and computed values agree exactly.
    Pass,
    /// They differ; `detail` holds the witnesses.
    Fail,
    /// The check was not run; `detail` holds the reason.
    Skipped,
}

/// One verified (or skipped) fact.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationRecord {
    /// The suite that produced the record.
    pub suite: Suite,
    /// The parameters the fact was checked at.
    pub params: RecordParams,
    /// The statement being checked, as stable text.
    pub claim: String,
    /// The value the statement predicts.
    pub expected: Value,
    /// The value actually computed.
    pub computed: Value,
    /// Pass, fail, or skipped.
    pub status: Status,
    /// Failure witnesses or skip reason.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Always zero, so report bytes do not depend on timing.
    pub elapsed_ms: u64,
}

impl VerificationRecord {
    /// Build a record by exact comparison; `detail` is kept only on failure.
    pub fn check(
        suite: Suite,
        params: RecordParams,
        claim: &str,
        expected: Value,
        computed: Value,
        detail: Option<String>,
    ) -> Self {
        let status = if expected == computed { Status::Pass } else { Status::Fail };
        VerificationRecord {
            suite,
            params,
            claim: claim.to_string(),
            expected,
            computed,
            status,
            detail: if status == Status::Fail { detail } else { None },
            elapsed_ms: 0,
        }
    }

    /// Build a skipped record with the reason it was not run.
    pub fn skipped(suite: Suite, params: RecordParams, claim: &str, reason: &str) -> Self {
        VerificationRecord {
            suite,
            params,
            claim: claim.to_string(),
            expected: Value::Null,
            computed: Value::Null,
            status: Status::Skipped,
            detail: Some(reason.to_string()),
            elapsed_ms: 0,
        }
    }

    fn sort_key(&self) -> (Suite, RecordParams, String) {
        (self.suite, self.params.clone(), self.claim.clone())
    }
}

const CLAIM_CELLS_PER_SIGN: &str =
    "interior vertex: one spin sign contributes min{i, n-i} + 2 cell classes";
const CLAIM_CELLS_UNION: &str =
    "interior vertex: the two spin signs together contribute min{i, n-i} + 4 cell classes";
const CLAIM_CELLS_EXTREME: &str =
    "chain endpoint: each spin sign contributes exactly one cell class";
const CLAIM_PERM_ADM: &str = "permissible cell classes equal admissible cell classes";
const CLAIM_VERTEXWISE: &str =
    "intersecting the facet-vertex saturations recovers the admissible double cosets";
const CLAIM_STRATA_TOP: &str = "each spin sign carries exactly two classes of full stratum rank";
const CLAIM_STRATA_LOWER: &str = "each stratum rank below the vertex index carries one class";
const CLAIM_STRATA_SHARED: &str =
    "the classes shared by both spin signs are exactly those below full rank";
const CLAIM_LIFT: &str =
    "the class representative lifts to a generic-fiber point satisfying the moduli clauses";
const CLAIM_PARA_ORDER: &str = "the lattice-chain diagram has exactly four self-dualities";
const CLAIM_PARA_TYPE: &str =
    "the self-duality group is cyclic exactly when the half-rank is odd";
const CLAIM_PARA_ORBITS: &str =
    "direct orbit enumeration matches the averaged fixed-point count";
const CLAIM_PARA_MAXIMAL: &str =
    "the maximal classes are the origin vertex and the low middle vertices";

const REASON_ENCODING: &str =
    "half-rank exceeds the compact-encoding bound for affine elements";
const REASON_LARGE: &str =
    "search is expensive at this half-rank; enable allow_large to run it";
const REASON_RANGE: &str = "index set contains entries above this half-rank";

/// Validate a configuration before running it.
pub fn validate_config(config: &SuiteConfig) -> Result<()> {
    if config.suites.is_empty() {
        return Err(Error::Config("no suites selected".into()));
    }
    if config.n_range.is_empty() {
        return Err(Error::Config("no half-ranks selected".into()));
    }
    for &n in &config.n_range {
        validate_rank(n)?;
        if n > 6 && !config.allow_large {
            return Err(Error::Config(format!(
                "half-rank {n} needs allow_large (searches grow quickly beyond n = 6)"
            )));
        }
    }
    if config.signs.is_empty() {
        return Err(Error::Config("no spin signs selected".into()));
    }
    if config.parallelism == 0 {
        return Err(Error::Config("parallelism must be at least 1".into()));
    }
    if let IndexSelection::Sets(sets) = &config.index_sets {
        if sets.is_empty() {
            return Err(Error::Config("explicit index-set list is empty".into()));
        }
        let max_n = *config.n_range.iter().max().expect("nonempty range");
        for set in sets {
            if set.is_empty() {
                return Err(Error::Config("index sets must be nonempty".into()));
            }
            if set.iter().any(|&i| i > max_n) {
                return Err(Error::Config(format!(
                    "index set {{{}}} exceeds every selected half-rank",
                    set.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
                )));
            }
        }
    }
    Ok(())
}

/// Run every selected suite and return the records sorted by canonical key.
pub fn run_suites(config: &SuiteConfig) -> Result<Vec<VerificationRecord>> {
    validate_config(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    let mut suites = config.suites.clone();
    suites.sort();
    suites.dedup();
    let mut records = Vec::new();
    for suite in suites {
        let batch = match suite {
            Suite::Cells => cells_records(config)?,
            Suite::PermAdm => pool.install(|| perm_adm_records(config))?,
            Suite::Vertexwise => pool.install(|| vertexwise_records(config))?,
            Suite::Strata => strata_records(config)?,
            Suite::Lifts => pool.install(|| lifts_records(config))?,
            Suite::Parahoric => parahoric_records(config)?,
        };
        records.extend(batch);
    }
    records.sort_by_key(|a| a.sort_key());
    Ok(records)
}

/// True when no record failed (skips do not count as failures).
pub fn all_passed(records: &[VerificationRecord]) -> bool {
    records.iter().all(|r| r.status != Status::Fail)
}

fn signs_of(config: &SuiteConfig) -> Vec<Sign> {
    let mut signs = Vec::new();
    for &sign in &config.signs {
        if !signs.contains(&sign) {
            signs.push(sign);
        }
    }
    signs
}

/// The index sets a run should visit at half-rank `n`, plus those from an
/// explicit list that do not fit this rank (reported as skipped).
fn index_sets_at(selection: &IndexSelection, n: usize) -> (Vec<BTreeSet<usize>>, Vec<BTreeSet<usize>>) {
    match selection {
        IndexSelection::All => {
            let mut sets = Vec::new();
            for mask in 1u32..(1 << (n + 1)) {
                let set: BTreeSet<usize> = (0..=n).filter(|i| mask >> i & 1 == 1).collect();
                sets.push(set);
            }
            sets.sort();
            (sets, Vec::new())
        }
        IndexSelection::Sets(sets) => {
            let mut fit = Vec::new();
            let mut out_of_range = Vec::new();
            for set in sets {
                if set.iter().all(|&i| i <= n) {
                    fit.push(set.clone());
                } else {
                    out_of_range.push(set.clone());
                }
            }
            fit.sort();
            fit.dedup();
            out_of_range.sort();
            out_of_range.dedup();
            (fit, out_of_range)
        }
    }
}

/// Sorted representative strings of a family of double cosets.
fn reps_value(cosets: &[DoubleCoset]) -> Value {
    let mut reps: Vec<String> = cosets.iter().map(|c| c.rep.to_string()).collect();
    reps.sort();
    Value::Array(reps.into_iter().map(Value::String).collect())
}

/// Witness text for two class families that were expected to be equal.
fn class_difference(
    lhs: &[DoubleCoset],
    lhs_label: &str,
    rhs: &[DoubleCoset],
    rhs_label: &str,
) -> Option<String> {
    let l: BTreeSet<&DoubleCoset> = lhs.iter().collect();
    let r: BTreeSet<&DoubleCoset> = rhs.iter().collect();
    if l == r {
        return None;
    }
    let mut parts = Vec::new();
    let only_l: Vec<String> = l.difference(&r).map(|c| c.rep.to_string()).collect();
    if !only_l.is_empty() {
        parts.push(format!("only {}: [{}]", lhs_label, only_l.join(", ")));
    }
    let only_r: Vec<String> = r.difference(&l).map(|c| c.rep.to_string()).collect();
    if !only_r.is_empty() {
        parts.push(format!("only {}: [{}]", rhs_label, only_r.join(", ")));
    }
    Some(parts.join("; "))
}

/// The admissible set for one sign, optionally enlarged by the spurious
/// translation `t^{2μ}` (which lies far above the admissible bound, so a
/// correct comparison must flag it).
fn admissible_for(sign: Sign, n: usize, mutate: bool) -> Result<Vec<AffineElement>> {
    let mu = sign.cochar(n)?;
    let mut adm = admissible_set(&mu, n)?;
    if mutate {
        let doubled: Vec<i64> = mu.vec().as_slice().iter().map(|x| 2 * x).collect();
        adm.push(AffineElement::translation(TransVec::from_vec(doubled)?));
        adm.sort();
        adm.dedup();
    }
    Ok(adm)
}

fn cells_records(config: &SuiteConfig) -> Result<Vec<VerificationRecord>> {
    let signs = signs_of(config);
    let both = signs.len() == 2;
    let mut records = Vec::new();
    for &n in &config.n_range {
        if n > MAX_ENCODABLE_RANK {
            records.push(VerificationRecord::skipped(
                Suite::Cells,
                RecordParams::rank(n),
                CLAIM_CELLS_UNION,
                REASON_ENCODING,
            ));
            continue;
        }
        for i in 0..=n {
            if i == 0 || i == n {
                for &sign in &signs {
                    let count = enumerate_perm(i, sign, n)?.len();
                    records.push(VerificationRecord::check(
                        Suite::Cells,
                        RecordParams::rank(n).with_vertex(i).with_sign(sign),
                        CLAIM_CELLS_EXTREME,
                        json!(1),
                        json!(count),
                        None,
                    ));
                }
                continue;
            }
            let mut union: BTreeSet<DoubleCoset> = BTreeSet::new();
            for &sign in &signs {
                let classes = enumerate_perm(i, sign, n)?;
                records.push(VerificationRecord::check(
                    Suite::Cells,
                    RecordParams::rank(n).with_vertex(i).with_sign(sign),
                    CLAIM_CELLS_PER_SIGN,
                    json!(i.min(n - i) + 2),
                    json!(classes.len()),
                    None,
                ));
                union.extend(classes);
            }
            if both {
                records.push(VerificationRecord::check(
                    Suite::Cells,
                    RecordParams::rank(n).with_vertex(i),
                    CLAIM_CELLS_UNION,
                    json!(i.min(n - i) + 4),
                    json!(union.len()),
                    None,
                ));
            }
        }
    }
    Ok(records)
}

fn perm_adm_records(config: &SuiteConfig) -> Result<Vec<VerificationRecord>> {
    let signs = signs_of(config);
    let mut records = Vec::new();
    for &n in &config.n_range {
        if n > MAX_ENCODABLE_RANK {
            records.push(VerificationRecord::skipped(
                Suite::PermAdm,
                RecordParams::rank(n),
                CLAIM_PERM_ADM,
                REASON_ENCODING,
            ));
            continue;
        }
        if n >= 6 && !config.allow_large {
            records.push(VerificationRecord::skipped(
                Suite::PermAdm,
                RecordParams::rank(n),
                CLAIM_PERM_ADM,
                REASON_LARGE,
            ));
            continue;
        }
        let (sets, out_of_range) = index_sets_at(&config.index_sets, n);
        for set in out_of_range {
            records.push(VerificationRecord::skipped(
                Suite::PermAdm,
                RecordParams::rank(n).with_index(&set),
                CLAIM_PERM_ADM,
                REASON_RANGE,
            ));
        }
        for &sign in &signs {
            let adm = admissible_for(sign, n, config.mutate_adm)?;
            let batch: Vec<Result<VerificationRecord>> = sets
                .par_iter()
                .map(|indices| {
                    let admissible = cell_classes(&adm, indices, n)?;
                    let permissible = if indices.len() == 1 {
                        let &i = indices.iter().next().expect("nonempty");
                        enumerate_perm(i, sign, n)?
                    } else {
                        enumerate_perm_general(indices, sign, n)?
                    };
                    let detail =
                        class_difference(&admissible, "admissible", &permissible, "permissible");
                    Ok(VerificationRecord::check(
                        Suite::PermAdm,
                        RecordParams::rank(n).with_index(indices).with_sign(sign),
                        CLAIM_PERM_ADM,
                        reps_value(&admissible),
                        reps_value(&permissible),
                        detail,
                    ))
                })
                .collect();
            for record in batch {
                records.push(record?);
            }
        }
    }
    Ok(records)
}

fn vertexwise_records(config: &SuiteConfig) -> Result<Vec<VerificationRecord>> {
    let signs = signs_of(config);
    let mut records = Vec::new();
    for &n in &config.n_range {
        if n > MAX_ENCODABLE_RANK {
            records.push(VerificationRecord::skipped(
                Suite::Vertexwise,
                RecordParams::rank(n),
                CLAIM_VERTEXWISE,
                REASON_ENCODING,
            ));
            continue;
        }
        if n >= 5 && !config.allow_large {
            records.push(VerificationRecord::skipped(
                Suite::Vertexwise,
                RecordParams::rank(n),
                CLAIM_VERTEXWISE,
                REASON_LARGE,
            ));
            continue;
        }
        let (sets, out_of_range) = index_sets_at(&config.index_sets, n);
        for set in out_of_range {
            records.push(VerificationRecord::skipped(
                Suite::Vertexwise,
                RecordParams::rank(n).with_index(&set),
                CLAIM_VERTEXWISE,
                REASON_RANGE,
            ));
        }
        // Every facet vertex that any selected index set touches.
        let mut labels = BTreeSet::new();
        for indices in &sets {
            labels.extend(facet_vertex_set(indices, n)?);
        }
        let labels: Vec<_> = labels.into_iter().collect();
        for &sign in &signs {
            let adm = admissible_for(sign, n, config.mutate_adm)?;
            // One saturation per facet vertex, shared across index sets.
            let saturations: Vec<Result<(StabilizerGroup, HashSet<u128>)>> = labels
                .par_iter()
                .map(|&label| {
                    let group = StabilizerGroup::for_points(&[label], n)?;
                    let keys: HashSet<u128> =
                        saturate_closure(&adm, &group).iter().map(|w| w.encode()).collect();
                    Ok((group, keys))
                })
                .collect();
            let mut vertex_data = Vec::with_capacity(labels.len());
            for entry in saturations {
                vertex_data.push(entry?);
            }
            let batch: Vec<Result<VerificationRecord>> = sets
                .par_iter()
                .map(|indices| {
                    let idx: Vec<usize> = indices.iter().copied().collect();
                    let joint = StabilizerGroup::for_chain_indices(&idx, n)?;
                    let facet = facet_vertex_set(indices, n)?;
                    let mut key_sets = Vec::new();
                    for (pos, &label) in labels.iter().enumerate() {
                        if facet.contains(&label) {
                            let (group, keys) = &vertex_data[pos];
                            if !joint.is_subgroup_of(group) {
                                return Err(Error::Config(format!(
                                    "facet vertex fixer at {label} does not contain the joint \
                                     stabilizer of {{{}}}",
                                    idx.iter()
                                        .map(|i| i.to_string())
                                        .collect::<Vec<_>>()
                                        .join(",")
                                )));
                            }
                            key_sets.push(keys);
                        }
                    }
                    // Intersect the saturations, starting from the smallest.
                    key_sets.sort_by_key(|k| k.len());
                    let (first, rest) =
                        key_sets.split_first().expect("facet vertex sets are nonempty");
                    let mut meet: Vec<u128> = first
                        .iter()
                        .copied()
                        .filter(|k| rest.iter().all(|keys| keys.contains(k)))
                        .collect();
                    meet.sort_unstable();
                    let meet: Vec<AffineElement> =
                        meet.into_iter().map(|k| AffineElement::decode(k, n)).collect();
                    let admissible = double_cosets(&adm, &joint);
                    let intersection = double_cosets_stable(&meet, &joint);
                    let detail = class_difference(
                        &admissible,
                        "admissible",
                        &intersection,
                        "vertexwise intersection",
                    );
                    Ok(VerificationRecord::check(
                        Suite::Vertexwise,
                        RecordParams::rank(n).with_index(indices).with_sign(sign),
                        CLAIM_VERTEXWISE,
                        reps_value(&admissible),
                        reps_value(&intersection),
                        detail,
                    ))
                })
                .collect();
            for record in batch {
                records.push(record?);
            }
        }
    }
    Ok(records)
}

fn strata_records(config: &SuiteConfig) -> Result<Vec<VerificationRecord>> {
    let signs = signs_of(config);
    let both = signs.len() == 2;
    let mut records = Vec::new();
    for &n in &config.n_range {
        if n > MAX_ENCODABLE_RANK {
            records.push(VerificationRecord::skipped(
                Suite::Strata,
                RecordParams::rank(n),
                CLAIM_STRATA_SHARED,
                REASON_ENCODING,
            ));
            continue;
        }
        for i in 1..n {
            let min_ell = (2 * i).saturating_sub(n);
            for &sign in &signs {
                // Orbit classes of permissible subsets, filtered by sign the
                // same way the cell classes are.
                let mut classes: BTreeSet<(usize, usize)> = BTreeSet::new();
                for e in IsoSubset::enumerate_permissible(i, n)? {
                    let class = orbit_classify(&e)?;
                    if class.0 == i && !spin_orbit_member(&e.mu(), sign, n)? {
                        continue;
                    }
                    classes.insert(class);
                }
                let top = classes.iter().filter(|(ell, _)| *ell == i).count();
                records.push(VerificationRecord::check(
                    Suite::Strata,
                    RecordParams::rank(n).with_vertex(i).with_sign(sign).with_ell(i),
                    CLAIM_STRATA_TOP,
                    json!(2),
                    json!(top),
                    None,
                ));
                let lower: Vec<usize> =
                    classes.iter().filter(|(ell, _)| *ell < i).map(|&(ell, _)| ell).collect();
                let expected: Vec<usize> = (min_ell..i).collect();
                records.push(VerificationRecord::check(
                    Suite::Strata,
                    RecordParams::rank(n).with_vertex(i).with_sign(sign),
                    CLAIM_STRATA_LOWER,
                    json!(expected),
                    json!(lower),
                    None,
                ));
            }
            if both {
                let plus: BTreeSet<DoubleCoset> =
                    enumerate_perm(i, Sign::Plus, n)?.into_iter().collect();
                let minus: BTreeSet<DoubleCoset> =
                    enumerate_perm(i, Sign::Minus, n)?.into_iter().collect();
                let shared = plus.intersection(&minus).count();
                records.push(VerificationRecord::check(
                    Suite::Strata,
                    RecordParams::rank(n).with_vertex(i),
                    CLAIM_STRATA_SHARED,
                    json!(i.min(n - i)),
                    json!(shared),
                    None,
                ));
            }
        }
    }
    Ok(records)
}

fn lifts_records(config: &SuiteConfig) -> Result<Vec<VerificationRecord>> {
    let mut units = Vec::new();
    for &n in &config.n_range {
        for i in 1..n {
            let min_ell = (2 * i).saturating_sub(n);
            for ell in min_ell..=i {
                let dees: &[usize] = if ell == i { &[1, 2, 3, 4] } else { &[1] };
                for &d in dees {
                    units.push((n, i, ell, d));
                }
            }
        }
    }
    let batch: Vec<Result<VerificationRecord>> = units
        .par_iter()
        .map(|&(n, i, ell, d)| {
            let pair = build_lift(ell, d, i, n)?;
            let report = check_lm_conditions(&pair, i, ell, d, n)?;
            Ok(VerificationRecord::check(
                Suite::Lifts,
                RecordParams::rank(n).with_vertex(i).with_ell(ell).with_d(d),
                CLAIM_LIFT,
                json!(true),
                json!(report.all_pass()),
                report.first_failure().map(|s| s.to_string()),
            ))
        })
        .collect();
    let mut records = Vec::new();
    for record in batch {
        records.push(record?);
    }
    Ok(records)
}

fn parahoric_records(config: &SuiteConfig) -> Result<Vec<VerificationRecord>> {
    let mut records = Vec::new();
    for &n in &config.n_range {
        let group = xi_group(n)?;
        records.push(VerificationRecord::check(
            Suite::Parahoric,
            RecordParams::rank(n),
            CLAIM_PARA_ORDER,
            json!(4),
            json!(group.order()),
            None,
        ));
        records.push(VerificationRecord::check(
            Suite::Parahoric,
            RecordParams::rank(n),
            CLAIM_PARA_TYPE,
            json!(n % 2 == 1),
            json!(group.is_cyclic()),
            None,
        ));
        records.push(VerificationRecord::check(
            Suite::Parahoric,
            RecordParams::rank(n),
            CLAIM_PARA_ORBITS,
            json!(conjugacy_class_count_burnside(n)?),
            json!(conjugacy_classes(n)?.len()),
            None,
        ));
        let expected: Vec<Vec<String>> = std::iter::once(vec!["0".to_string()])
            .chain((2..=n / 2).map(|i| vec![i.to_string()]))
            .collect();
        let computed: Vec<Vec<String>> = maximal_classes(n)?
            .iter()
            .map(|class| class.iter().map(|v| v.to_string()).collect())
            .collect();
        records.push(VerificationRecord::check(
            Suite::Parahoric,
            RecordParams::rank(n),
            CLAIM_PARA_MAXIMAL,
            json!(expected),
            json!(computed),
            None,
        ));
    }
    Ok(records)
}

/// Serialize a full report document to pretty JSON (stable byte-for-byte).
pub fn to_json(config: &SuiteConfig, records: &[VerificationRecord]) -> String {
    #[derive(Serialize)]
    struct Document<'a> {
        version: &'a str,
        config: &'a SuiteConfig,
        records: &'a [VerificationRecord],
    }
    let doc = Document { version: env!("CARGO_PKG_VERSION"), config, records };
    let mut out = serde_json::to_string_pretty(&doc).expect("report serialization cannot fail");
    out.push('\n');
    out
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Serialize records as RFC 4180 CSV with a fixed header row.
pub fn to_csv(records: &[VerificationRecord]) -> String {
    let mut out = String::from(
        "suite,n,index_set,sign,ell,d,status,expected,computed,claim,detail,elapsed_ms\n",
    );
    for r in records {
        let index_set = r
            .params
            .index_set
            .as_ref()
            .map(|ix| ix.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";"))
            .unwrap_or_default();
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        };
        let fields = [
            r.suite.name().to_string(),
            r.params.n.to_string(),
            index_set,
            r.params.sign.clone().unwrap_or_default(),
            r.params.ell.map(|v| v.to_string()).unwrap_or_default(),
            r.params.d.map(|v| v.to_string()).unwrap_or_default(),
            status.to_string(),
            serde_json::to_string(&r.expected).expect("value serializes"),
            serde_json::to_string(&r.computed).expect("value serializes"),
            r.claim.clone(),
            r.detail.clone().unwrap_or_default(),
            r.elapsed_ms.to_string(),
        ];
        let line: Vec<String> = fields.iter().map(|f| csv_escape(f)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Render records as human-readable text, optionally with ANSI colors.
pub fn to_text(records: &[VerificationRecord], color: bool) -> String {
    let paint = |token: &str, code: &str| -> String {
        if color {
            format!("\x1b[{code}m{token}\x1b[0m")
        } else {
            token.to_string()
        }
    };
    let mut out = String::new();
    let mut passed = 0usize;
    let mut failed = 0usize;
    let mut skipped = 0usize;
    for r in records {
        let tag = match r.status {
            Status::Pass => {
                passed += 1;
                paint("PASS", "32")
            }
            Status::Fail => {
                failed += 1;
                paint("FAIL", "31")
            }
            Status::Skipped => {
                skipped += 1;
                paint("SKIP", "33")
            }
        };
        out.push_str(&format!("{tag} {:<10} {} — {}\n", r.suite.name(), r.params.label(), r.claim));
        match r.status {
            Status::Fail => {
                out.push_str(&format!(
                    "     expected: {}\n     computed: {}\n",
                    r.expected, r.computed
                ));
                if let Some(detail) = &r.detail {
                    out.push_str(&format!("     detail: {detail}\n"));
                }
            }
            Status::Skipped => {
                if let Some(detail) = &r.detail {
                    out.push_str(&format!("     reason: {detail}\n"));
                }
            }
            Status::Pass => {}
        }
    }
    out.push_str(&format!(
        "{} checks: {passed} passed, {failed} failed, {skipped} skipped\n",
        records.len()
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(suites: &[Suite], n: usize) -> SuiteConfig {
        SuiteConfig { suites: suites.to_vec(), n_range: vec![n], ..SuiteConfig::default() }
    }

    #[test]
    fn suite_names_round_trip() {
        for suite in Suite::ALL {
            assert_eq!(Suite::parse(suite.name()).unwrap(), suite);
        }
        assert_eq!(Suite::parse("PERM_ADM").unwrap(), Suite::PermAdm);
        assert!(Suite::parse("nonsense").is_err());
    }

    #[test]
    fn config_validation_rejects_bad_input() {
        let base = SuiteConfig::default;
        let bad = [
            SuiteConfig { suites: Vec::new(), ..base() },
            SuiteConfig { n_range: vec![3], ..base() },
            SuiteConfig { n_range: vec![7], ..base() },
            SuiteConfig { parallelism: 0, ..base() },
            SuiteConfig { index_sets: IndexSelection::Sets(vec![BTreeSet::new()]), ..base() },
            SuiteConfig { index_sets: IndexSelection::Sets(vec![BTreeSet::from([9])]), ..base() },
        ];
        for config in bad {
            assert!(validate_config(&config).is_err());
        }
        assert!(validate_config(&base()).is_ok());
        let unlocked = SuiteConfig { n_range: vec![7], allow_large: true, ..base() };
        assert!(validate_config(&unlocked).is_ok());
    }

    #[test]
    fn cells_suite_matches_the_closed_forms() {
        let records = run_suites(&config(&[Suite::Cells], 4)).unwrap();
        // Two endpoint records per sign plus three records per interior vertex.
        assert_eq!(records.len(), 2 * 2 + 3 * 3);
        assert!(records.iter().all(|r| r.status == Status::Pass));
        assert!(all_passed(&records));
    }

    #[test]
    fn strata_suite_matches_the_rank_partition() {
        let records = run_suites(&config(&[Suite::Strata], 4)).unwrap();
        // Per interior vertex: (top + lower) per sign, plus one shared record.
        assert_eq!(records.len(), 3 * (2 * 2 + 1));
        assert!(records.iter().all(|r| r.status == Status::Pass));
    }

    #[test]
    fn lifts_suite_passes_every_stratum() {
        let records = run_suites(&config(&[Suite::Lifts], 4)).unwrap();
        assert!(!records.is_empty());
        assert!(records.iter().all(|r| r.status == Status::Pass));
    }

    #[test]
    fn parahoric_suite_passes_at_both_parities() {
        let mut c = config(&[Suite::Parahoric], 4);
        c.n_range = vec![4, 5];
        let records = run_suites(&c).unwrap();
        assert_eq!(records.len(), 8);
        assert!(records.iter().all(|r| r.status == Status::Pass));
    }

    #[test]
    fn perm_adm_suite_passes_and_detects_an_injected_class() {
        let mut c = config(&[Suite::PermAdm], 4);
        c.index_sets = IndexSelection::Sets(vec![BTreeSet::from([2]), BTreeSet::from([0, 2])]);
        let clean = run_suites(&c).unwrap();
        assert_eq!(clean.len(), 4);
        assert!(clean.iter().all(|r| r.status == Status::Pass));
        c.mutate_adm = true;
        let mutated = run_suites(&c).unwrap();
        assert!(mutated.iter().all(|r| r.status == Status::Fail));
        assert!(mutated
            .iter()
            .all(|r| r.detail.as_deref().is_some_and(|d| d.contains("only admissible"))));
    }

    #[test]
    fn vertexwise_suite_passes_at_low_rank_and_gates_above() {
        let mut c = config(&[Suite::Vertexwise], 4);
        c.index_sets = IndexSelection::Sets(vec![
            BTreeSet::from([2]),
            BTreeSet::from([0, 2]),
            BTreeSet::from([1, 3]),
        ]);
        let records = run_suites(&c).unwrap();
        assert_eq!(records.len(), 6);
        assert!(records.iter().all(|r| r.status == Status::Pass));
        c.n_range = vec![5];
        let gated = run_suites(&c).unwrap();
        assert!(gated.iter().all(|r| r.status == Status::Skipped));
        assert!(gated[0].detail.as_deref().is_some_and(|d| d.contains("allow_large")));
    }

    #[test]
    fn reports_are_deterministic_across_thread_counts() {
        let serial = config(&[Suite::Cells, Suite::Lifts, Suite::Parahoric], 4);
        let one = run_suites(&serial).unwrap();
        let mut threaded = serial.clone();
        threaded.parallelism = 4;
        let four = run_suites(&threaded).unwrap();
        // The whole document — config echo included — must not depend on
        // how many workers produced it.
        assert_eq!(to_json(&serial, &one), to_json(&threaded, &four));
        assert_eq!(to_csv(&one), to_csv(&four));
        let mut keys: Vec<_> = one.iter().map(|r| r.sort_key()).collect();
        let sorted = {
            let mut k = keys.clone();
            k.sort();
            k
        };
        assert_eq!(keys, sorted);
        keys.dedup();
        assert_eq!(keys.len(), one.len(), "sort keys must be unique");
    }

    #[test]
    fn json_document_echoes_the_configuration() {
        let c = config(&[Suite::Parahoric], 4);
        let records = run_suites(&c).unwrap();
        let doc: Value = serde_json::from_str(&to_json(&c, &records)).unwrap();
        assert_eq!(doc["config"]["index_sets"], json!("all"));
        assert_eq!(doc["config"]["signs"], json!(["+", "-"]));
        assert_eq!(doc["config"]["suites"], json!(["parahoric"]));
        assert_eq!(doc["records"].as_array().unwrap().len(), records.len());
        assert_eq!(doc["records"][0]["status"], json!("pass"));
        assert_eq!(doc["records"][0]["elapsed_ms"], json!(0));
        // Sign-free records must omit the optional parameter fields.
        assert!(doc["records"][0]["params"].get("sign").is_none());
    }

    #[test]
    fn csv_escapes_embedded_commas_and_quotes() {
        let record = VerificationRecord::check(
            Suite::Cells,
            RecordParams::rank(4).with_vertex(2),
            "claim with, a comma and \"quotes\"",
            json!(1),
            json!(2),
            Some("witness, with comma".into()),
        );
        let csv = to_csv(&[record]);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "suite,n,index_set,sign,ell,d,status,expected,computed,claim,detail,elapsed_ms"
        );
        let row = lines.next().unwrap();
        assert!(row.contains("\"claim with, a comma and \"\"quotes\"\"\""));
        assert!(row.contains("\"witness, with comma\""));
    }

    #[test]
    fn text_rendering_reports_failures_and_skips() {
        let fail = VerificationRecord::check(
            Suite::Strata,
            RecordParams::rank(4).with_vertex(1).with_sign(Sign::Plus),
            "demonstration claim",
            json!(2),
            json!(3),
            Some("witness class".into()),
        );
        let skip = VerificationRecord::skipped(
            Suite::Vertexwise,
            RecordParams::rank(5),
            CLAIM_VERTEXWISE,
            REASON_LARGE,
        );
        let text = to_text(&[fail.clone(), skip], false);
        assert!(text.contains("FAIL strata"));
        assert!(text.contains("expected: 2"));
        assert!(text.contains("detail: witness class"));
        assert!(text.contains("SKIP vertexwise"));
        assert!(text.contains("reason:"));
        assert!(text.contains("2 checks: 0 passed, 1 failed, 1 skipped"));
        assert!(!all_passed(std::slice::from_ref(&fail)));
        let colored = to_text(&[fail], true);
        assert!(colored.contains("\x1b[31mFAIL\x1b[0m"));
    }

    /// Text heavily seeded with the characters a CSV writer must escape.
    fn csv_hostile_text() -> impl proptest::strategy::Strategy<Value = String> {
        use proptest::prelude::*;
        proptest::collection::vec(
            prop_oneof![
                Just(','),
                Just('"'),
                Just('\n'),
                Just('\r'),
                any::<char>(),
            ],
            0..48,
        )
        .prop_map(|chars| chars.into_iter().collect())
    }

    proptest::proptest! {
        // Oracle for the hand-rolled writer: an independent reader must
        // recover every field byte-for-byte, whatever the text contains.
        #[test]
        fn csv_fields_survive_arbitrary_text(claim in csv_hostile_text(), detail in csv_hostile_text()) {
            let record = VerificationRecord::check(
                Suite::Cells,
                RecordParams::rank(4),
                &claim,
                json!(1),
                json!(2),
                Some(detail.clone()),
            );
            let rendered = to_csv(&[record]);
            let mut reader = csv::ReaderBuilder::new().from_reader(rendered.as_bytes());
            let rows: Vec<csv::StringRecord> =
                reader.records().collect::<std::result::Result<_, _>>().unwrap();
            proptest::prop_assert_eq!(rows.len(), 1);
            proptest::prop_assert_eq!(&rows[0][9], claim.as_str());
            proptest::prop_assert_eq!(&rows[0][10], detail.as_str());
        }
    }
}
