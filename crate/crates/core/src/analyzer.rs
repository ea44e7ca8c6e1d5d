//! Exhaustive access-structure sweeps over all share subsets, checked
//! against the closed-form thresholds.
//!
//! Subsets are bitmasks over the n shares and are always visited in
//! (size, lexicographic) order. Sweeps run in parallel on the rayon pool;
//! results are merged in that order, so reports are deterministic.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::qsim::{self, Caps, Mode, QsimError};
use crate::scheme::{CodePair, Thresholds};

/// Largest n accepted for a full subset sweep.
pub const MAX_SWEEP_SHARES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalyzerError {
    #[error("sweeping 2^{n} subsets exceeds the supported n <= {MAX_SWEEP_SHARES}")]
    TooManyShares { n: usize },
    #[error("share set {}: {source}", display_set(.j))]
    AtSubset { j: Vec<usize>, source: QsimError },
}

impl AnalyzerError {
    pub fn is_cap_violation(&self) -> bool {
        matches!(
            self,
            AnalyzerError::AtSubset {
                source: QsimError::CapExceeded { .. },
                ..
            }
        )
    }

    pub fn is_disagreement(&self) -> bool {
        matches!(
            self,
            AnalyzerError::AtSubset {
                source: QsimError::PathDisagreement { .. },
                ..
            }
        )
    }
}

/// 1-based rendering used in reports and messages.
pub fn display_set(j: &[usize]) -> String {
    let items: Vec<String> = j.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn one_based(j: &[usize]) -> Vec<usize> {
    j.iter().map(|i| i + 1).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AccessClass {
    Forbidden,
    Intermediate,
    Qualified,
}

impl AccessClass {
    fn from_flags(forbidden: bool, qualified: bool) -> Self {
        match (forbidden, qualified) {
            (_, true) => AccessClass::Qualified,
            (true, false) => AccessClass::Forbidden,
            (false, false) => AccessClass::Intermediate,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AccessClass::Forbidden => "forbidden",
            AccessClass::Intermediate => "intermediate",
            AccessClass::Qualified => "qualified",
        }
    }
}

/// Share subsets of {0..n} in (size, lex) order.
pub fn subsets_in_order(n: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (0u64..1 << n)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all
}

fn mask_of(j: &[usize]) -> usize {
    j.iter().fold(0usize, |m, &i| m | 1 << i)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetRow {
    pub j: Vec<usize>,
    pub class: AccessClass,
    pub fast: Option<AccessClass>,
    pub oracle: Option<AccessClass>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SizeSummary {
    pub size: usize,
    pub forbidden: usize,
    pub intermediate: usize,
    pub qualified: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Soundness {
    /// Every (I, J) within the strong-security bound is secure.
    pub strong_bound: bool,
    /// Every J at or above the qualified threshold is qualified.
    pub qualified_bound: bool,
    /// Every J at or below the forbidden threshold is forbidden.
    pub forbidden_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessReport {
    pub thresholds: Thresholds,
    pub mode: Mode,
    pub n: usize,
    pub l: usize,
    /// All 2^n subsets in (size, lex) order.
    pub rows: Vec<SubsetRow>,
    pub qualified_bound_counterexamples: Vec<Vec<usize>>,
    pub forbidden_bound_counterexamples: Vec<Vec<usize>>,
    /// Supersets of qualified sets are qualified and subsets of forbidden
    /// sets are forbidden.
    pub monotone: bool,
    /// No set is both qualified and forbidden.
    pub disjoint: bool,
}

impl AccessReport {
    pub fn class_of(&self, j: &[usize]) -> Option<AccessClass> {
        self.rows.iter().find(|r| r.j == j).map(|r| r.class)
    }

    pub fn size_summary(&self) -> Vec<SizeSummary> {
        let mut out: Vec<SizeSummary> = (0..=self.n)
            .map(|size| SizeSummary {
                size,
                ..Default::default()
            })
            .collect();
        for r in &self.rows {
            let s = &mut out[r.j.len()];
            match r.class {
                AccessClass::Forbidden => s.forbidden += 1,
                AccessClass::Intermediate => s.intermediate += 1,
                AccessClass::Qualified => s.qualified += 1,
            }
        }
        out
    }

    /// Largest s such that every J with |J| <= s is forbidden (-1 if none).
    pub fn exact_forbidden_max_size(&self) -> i64 {
        let summary = self.size_summary();
        let mut best = -1;
        for s in &summary {
            if s.forbidden == s.intermediate + s.forbidden + s.qualified {
                best = s.size as i64;
            } else {
                break;
            }
        }
        best
    }

    /// Smallest s such that every J with |J| >= s is qualified (n+1 if none).
    pub fn exact_qualified_min_size(&self) -> i64 {
        let summary = self.size_summary();
        let mut best = self.n as i64 + 1;
        for s in summary.iter().rev() {
            if s.qualified == s.intermediate + s.forbidden + s.qualified {
                best = s.size as i64;
            } else {
                break;
            }
        }
        best
    }
}

/// Classify every share subset.
pub fn classify_all(cp: &CodePair, mode: Mode, caps: &Caps) -> Result<AccessReport, AnalyzerError> {
    let n = cp.n();
    if n > MAX_SWEEP_SHARES {
        return Err(AnalyzerError::TooManyShares { n });
    }
    let order = subsets_in_order(n);

    let forbidden_by_mask = |runner: &(dyn Fn(&[usize]) -> Result<bool, QsimError> + Sync)| {
        let values: Result<Vec<(usize, bool)>, AnalyzerError> = order
            .par_iter()
            .map(|j| {
                runner(j)
                    .map(|v| (mask_of(j), v))
                    .map_err(|source| AnalyzerError::AtSubset { j: j.clone(), source })
            })
            .collect();
        values.map(|pairs| {
            let mut table = vec![false; 1 << n];
            for (m, v) in pairs {
                table[m] = v;
            }
            table
        })
    };

    let fast = if mode.runs_fast() {
        Some(forbidden_by_mask(&|j: &[usize]| qsim::forbidden_fast(cp, j))?)
    } else {
        None
    };
    let oracle = if mode.runs_oracle() {
        Some(forbidden_by_mask(&|j: &[usize]| {
            qsim::forbidden_oracle(cp, j, caps)
        })?)
    } else {
        None
    };

    let full = (1usize << n) - 1;
    let class_from = |table: &Vec<bool>, m: usize| AccessClass::from_flags(table[m], table[full ^ m]);

    let mut rows = Vec::with_capacity(order.len());
    let mut disjoint = true;
    for j in &order {
        let m = mask_of(j);
        let f = fast.as_ref().map(|t| class_from(t, m));
        let o = oracle.as_ref().map(|t| class_from(t, m));
        if let (Some(fc), Some(oc)) = (f, o) {
            if fc != oc || fast.as_ref().unwrap()[m] != oracle.as_ref().unwrap()[m] {
                return Err(AnalyzerError::AtSubset {
                    j: j.clone(),
                    source: QsimError::PathDisagreement {
                        what: format!("classification ({} vs {})", fc.as_str(), oc.as_str()),
                        fast: fast.as_ref().unwrap()[m],
                        oracle: oracle.as_ref().unwrap()[m],
                    },
                });
            }
        }
        let table = fast.as_ref().or(oracle.as_ref()).expect("at least one path runs");
        if table[m] && table[full ^ m] {
            disjoint = false;
        }
        rows.push(SubsetRow {
            j: j.clone(),
            class: class_from(table, m),
            fast: f,
            oracle: o,
        });
    }

    let thresholds = cp.params().thresholds();
    let forbidden_bound_counterexamples: Vec<Vec<usize>> = rows
        .iter()
        .filter(|r| thresholds.guarantees_forbidden(r.j.len()) && r.class != AccessClass::Forbidden)
        .map(|r| r.j.clone())
        .collect();
    let qualified_bound_counterexamples: Vec<Vec<usize>> = rows
        .iter()
        .filter(|r| thresholds.guarantees_qualified(r.j.len()) && r.class != AccessClass::Qualified)
        .map(|r| r.j.clone())
        .collect();

    let mut by_mask = vec![AccessClass::Intermediate; 1 << n];
    for r in &rows {
        by_mask[mask_of(&r.j)] = r.class;
    }
    let monotone = (0..1usize << n).all(|m| {
        (0..n).filter(|&i| m >> i & 1 == 0).all(|i| {
            let bigger = by_mask[m | 1 << i];
            let smaller = by_mask[m];
            (smaller != AccessClass::Qualified || bigger == AccessClass::Qualified)
                && (bigger != AccessClass::Forbidden || smaller == AccessClass::Forbidden)
        })
    });

    Ok(AccessReport {
        thresholds,
        mode,
        n,
        l: cp.l(),
        rows,
        qualified_bound_counterexamples,
        forbidden_bound_counterexamples,
        monotone,
        disjoint,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongRow {
    pub i_set: Vec<usize>,
    pub j: Vec<usize>,
    pub secure: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongSecurityMap {
    pub thresholds: Thresholds,
    pub l: usize,
    /// All (I, J), I in (size, lex) order, J in (size, lex) order.
    pub rows: Vec<StrongRow>,
    /// Pairs within the bound that are not secure (must be empty).
    pub counterexamples: Vec<(Vec<usize>, Vec<usize>)>,
    /// Secure pairs beyond the bound (allowed; the bound is sufficient).
    pub beyond_bound: usize,
    /// Secure for (I, J) implies secure for (I, J') with J' inside J.
    pub monotone: bool,
}

impl StrongSecurityMap {
    pub fn strong_bound_sound(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn is_secure(&self, i_set: &[usize], j: &[usize]) -> Option<bool> {
        self.rows
            .iter()
            .find(|r| r.i_set == i_set && r.j == j)
            .map(|r| r.secure)
    }
}

/// Strong security for every (I, J).
pub fn strong_security_map(
    cp: &CodePair,
    mode: Mode,
    caps: &Caps,
) -> Result<StrongSecurityMap, AnalyzerError> {
    let n = cp.n();
    if n > MAX_SWEEP_SHARES {
        return Err(AnalyzerError::TooManyShares { n });
    }
    let l = cp.l();
    let js = subsets_in_order(n);
    let is = subsets_in_order(l);
    let pairs: Vec<(&Vec<usize>, &Vec<usize>)> =
        is.iter().flat_map(|i| js.iter().map(move |j| (i, j))).collect();
    let rows: Vec<StrongRow> = pairs
        .par_iter()
        .map(|&(i, j)| {
            qsim::strong_security(cp, i, j, mode, caps)
                .map(|secure| StrongRow {
                    i_set: i.clone(),
                    j: j.clone(),
                    secure,
                })
                .map_err(|source| AnalyzerError::AtSubset { j: j.clone(), source })
        })
        .collect::<Result<_, _>>()?;

    let thresholds = cp.params().thresholds();
    let mut counterexamples = Vec::new();
    let mut beyond_bound = 0;
    for r in &rows {
        let guaranteed = thresholds.guarantees_strong(l - r.i_set.len(), r.j.len());
        if guaranteed && !r.secure {
            counterexamples.push((r.i_set.clone(), r.j.clone()));
        }
        if !guaranteed && r.secure {
            beyond_bound += 1;
        }
    }

    let mut table = vec![vec![false; 1 << n]; 1 << l];
    for r in &rows {
        table[mask_of(&r.i_set)][mask_of(&r.j)] = r.secure;
    }
    let monotone = table.iter().all(|per_j| {
        (0..1usize << n)
            .all(|m| !per_j[m] || (0..n).filter(|&i| m >> i & 1 == 1).all(|i| per_j[m & !(1 << i)]))
    });

    Ok(StrongSecurityMap {
        thresholds,
        l,
        rows,
        counterexamples,
        beyond_bound,
        monotone,
    })
}

fn class_value(c: Option<AccessClass>) -> Value {
    c.map_or(Value::Null, |c| json!(c.as_str()))
}

fn threshold_view(t: &Thresholds) -> Value {
    let strong: Vec<Value> = (0..=t.l)
        .map(|k| json!({"i_bar": k, "max_j": t.strong_bound(k)}))
        .collect();
    json!({
        "deg_g": t.deg_g,
        "genus": t.genus,
        "n": t.n,
        "L": t.l,
        "t_forbidden": t.t_forbidden,
        "t_qualified": t.t_qualified,
        "forbidden_vacuous": t.forbidden_vacuous(),
        "qualified_vacuous": t.qualified_vacuous(),
        "strong_bound": strong,
    })
}

/// Full analysis result ready for rendering.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub access: AccessReport,
    pub strong: StrongSecurityMap,
}

impl Analysis {
    pub fn run(cp: &CodePair, mode: Mode, caps: &Caps) -> Result<Self, AnalyzerError> {
        Ok(Analysis {
            access: classify_all(cp, mode, caps)?,
            strong: strong_security_map(cp, mode, caps)?,
        })
    }

    pub fn soundness(&self) -> Soundness {
        Soundness {
            strong_bound: self.strong.strong_bound_sound(),
            qualified_bound: self.access.qualified_bound_counterexamples.is_empty(),
            forbidden_bound: self.access.forbidden_bound_counterexamples.is_empty(),
        }
    }

    /// All soundness flags and structural invariants hold.
    pub fn is_sound(&self) -> bool {
        let s = self.soundness();
        s.strong_bound
            && s.qualified_bound
            && s.forbidden_bound
            && self.access.monotone
            && self.access.disjoint
            && self.strong.monotone
    }

    /// JSON document. Share and secret indices are 1-based. Without
    /// `full`, classification rows are limited to sizes strictly between
    /// the exact all-forbidden and all-qualified sizes, and strong security
    /// is aggregated over all I with the same |I-bar|.
    pub fn to_json(&self, instance: Value, tool_version: &str, full: bool) -> Value {
        let a = &self.access;
        let lo = a.exact_forbidden_max_size();
        let hi = a.exact_qualified_min_size();
        let classification: Vec<Value> = a
            .rows
            .iter()
            .filter(|r| full || ((r.j.len() as i64) > lo && (r.j.len() as i64) < hi))
            .map(|r| {
                json!({
                    "J": one_based(&r.j),
                    "class": r.class.as_str(),
                    "fast": class_value(r.fast),
                    "oracle": class_value(r.oracle),
                })
            })
            .collect();

        let strong: Vec<Value> = if full {
            self.strong
                .rows
                .iter()
                .map(|r| json!({"I": one_based(&r.i_set), "J": one_based(&r.j), "secure": r.secure}))
                .collect()
        } else {
            let mut out = Vec::new();
            for i_bar in 0..=self.strong.l {
                for j in subsets_in_order(a.n) {
                    let matching: Vec<&StrongRow> = self
                        .strong
                        .rows
                        .iter()
                        .filter(|r| r.j == j && self.strong.l - r.i_set.len() == i_bar)
                        .collect();
                    let secure_count = matching.iter().filter(|r| r.secure).count();
                    out.push(json!({
                        "i_bar": i_bar,
                        "J": one_based(&j),
                        "secure": secure_count == matching.len(),
                        "secure_count": secure_count,
                        "of": matching.len(),
                    }));
                }
            }
            out
        };

        let soundness = self.soundness();
        json!({
            "tool_version": tool_version,
            "instance": instance,
            "mode": a.mode.to_string(),
            "full": full,
            "thresholds": threshold_view(&a.thresholds),
            "access": {
                "exact_forbidden_max_size": lo,
                "exact_qualified_min_size": hi,
                "sizes": a.size_summary(),
                "monotone": a.monotone,
                "disjoint": a.disjoint,
            },
            "classification": classification,
            "strong_security": strong,
            "strong_security_beyond_bound": self.strong.beyond_bound,
            "soundness": {
                "theorem1": soundness.strong_bound,
                "eq7": soundness.qualified_bound,
                "eq8": soundness.forbidden_bound,
            },
            "counterexamples": {
                "eq7": a.qualified_bound_counterexamples.iter().map(|j| one_based(j)).collect::<Vec<_>>(),
                "eq8": a.forbidden_bound_counterexamples.iter().map(|j| one_based(j)).collect::<Vec<_>>(),
                "theorem1": self.strong.counterexamples.iter()
                    .map(|(i, j)| json!({"I": one_based(i), "J": one_based(j)}))
                    .collect::<Vec<_>>(),
            },
        })
    }

    /// One CSV table holding both sweeps; the `table` column tells them
    /// apart. Sets are space-separated 1-based indices.
    pub fn to_csv(&self, instance_hash: &str, tool_version: &str) -> Result<String, csv::Error> {
        let join = |j: &[usize]| {
            one_based(j)
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let opt = |c: Option<AccessClass>| c.map_or("", AccessClass::as_str);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "instance_hash",
            "tool_version",
            "table",
            "I",
            "J",
            "size",
            "class",
            "fast",
            "oracle",
            "secure",
        ])?;
        for r in &self.access.rows {
            let size = r.j.len().to_string();
            w.write_record([
                instance_hash,
                tool_version,
                "classification",
                "",
                &join(&r.j),
                &size,
                r.class.as_str(),
                opt(r.fast),
                opt(r.oracle),
                "",
            ])?;
        }
        for r in &self.strong.rows {
            let size = r.j.len().to_string();
            w.write_record([
                instance_hash,
                tool_version,
                "strong_security",
                &join(&r.i_set),
                &join(&r.j),
                &size,
                "",
                "",
                "",
                if r.secure { "true" } else { "false" },
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::CurveModel;
    use crate::gf::Field;
    use crate::scheme::SchemeParams;

    fn build(p: u32, m: u32, hermitian: Option<u32>, u: u32, n: usize, l: usize) -> CodePair {
        let f = Field::with_default_modulus(p, m).unwrap();
        let c = match hermitian {
            Some(q0) => CurveModel::hermitian(&f, q0).unwrap(),
            None => CurveModel::rational(&f),
        };
        CodePair::build(SchemeParams::with_default_places(c, u, n, l).unwrap()).unwrap()
    }

    #[test]
    fn subset_order() {
        let s = subsets_in_order(3);
        assert_eq!(
            s,
            vec![
                vec![],
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 1, 2]
            ]
        );
        assert_eq!(display_set(&[0, 2]), "{1,3}");
    }

    #[test]
    fn rs_has_no_intermediate_sets() {
        let cp = build(5, 1, None, 1, 3, 1);
        let r = classify_all(&cp, Mode::Both, &Caps::default()).unwrap();
        for row in &r.rows {
            let expected = if row.j.len() <= 1 {
                AccessClass::Forbidden
            } else {
                AccessClass::Qualified
            };
            assert_eq!(row.class, expected);
        }
        assert_eq!(
            (r.exact_forbidden_max_size(), r.exact_qualified_min_size()),
            (1, 2)
        );
        assert!(r.monotone && r.disjoint);
    }

    #[test]
    fn instance_a_classification() {
        let cp = build(2, 2, Some(2), 4, 6, 2);
        let a = Analysis::run(&cp, Mode::Both, &Caps::default()).unwrap();
        assert_eq!(a.access.rows.len(), 64);
        assert!(a.is_sound());
        assert_eq!(a.access.class_of(&[]), Some(AccessClass::Forbidden));
        assert_eq!(
            a.access.class_of(&[0, 1, 2, 3, 4, 5]),
            Some(AccessClass::Qualified)
        );
        assert!(a.access.exact_forbidden_max_size() >= 1);
        assert!(a.access.exact_qualified_min_size() <= 5);
        // I = everything reproduces the forbidden column
        for row in &a.access.rows {
            assert_eq!(
                a.strong.is_secure(&[0, 1], &row.j),
                Some(row.class == AccessClass::Forbidden)
            );
        }
        // |J| <= |I-bar| + 1 is always secure
        for r in &a.strong.rows {
            if r.j.len() <= 2 - r.i_set.len() + 1 {
                assert!(r.secure);
            }
        }
        assert!(a.strong.monotone);
    }

    #[test]
    fn fast_only_mode_leaves_oracle_empty() {
        let cp = build(5, 1, None, 1, 3, 1);
        let r = classify_all(&cp, Mode::Fast, &Caps::default()).unwrap();
        assert!(r
            .rows
            .iter()
            .all(|row| row.fast.is_some() && row.oracle.is_none()));
    }

    #[test]
    fn cap_errors_name_the_subset() {
        let cp = build(2, 2, Some(2), 4, 7, 1);
        let err = classify_all(&cp, Mode::Oracle, &Caps::default()).unwrap_err();
        assert!(err.is_cap_violation());
        assert!(err.to_string().starts_with("share set {}"), "{err}");
    }

    #[test]
    fn json_and_csv_rendering() {
        let cp = build(5, 1, None, 1, 3, 1);
        let a = Analysis::run(&cp, Mode::Both, &Caps::default()).unwrap();
        let full = a.to_json(json!({"hash": "h"}), "0.1.0", true);
        assert_eq!(full["classification"].as_array().unwrap().len(), 8);
        assert_eq!(full["strong_security"].as_array().unwrap().len(), 16);
        assert_eq!(
            full["soundness"],
            json!({"theorem1": true, "eq7": true, "eq8": true})
        );
        assert_eq!(full["classification"][7]["J"], json!([1, 2, 3]));
        let compact = a.to_json(json!({}), "0.1.0", false);
        assert_eq!(compact["classification"].as_array().unwrap().len(), 0);
        let csv = a.to_csv("h", "0.1.0").unwrap();
        assert_eq!(csv.lines().count(), 1 + 8 + 16);
        assert!(csv
            .lines()
            .nth(8)
            .unwrap()
            .contains("classification,,1 2 3,3,qualified,qualified,qualified,"));
    }

    #[test]
    fn too_many_shares() {
        let f = Field::with_default_modulus(2, 4).unwrap();
        let c = CurveModel::rational(&f);
        let cp = CodePair::build(SchemeParams::with_default_places(c, 5, 13, 1).unwrap()).unwrap();
        assert_eq!(
            classify_all(&cp, Mode::Fast, &Caps::default()).unwrap_err(),
            AnalyzerError::TooManyShares { n: 13 }
        );
    }
}
