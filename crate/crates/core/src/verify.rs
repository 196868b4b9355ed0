//! Verification suites with machine-readable reports.
//!
//! Each suite builds fresh random models from `(p, seed)`, computes the
//! relevant Koszul cohomology and compares exact integers with the
//! predicted values. Suites refuse to run below their characteristic
//! bound unless forced; forced runs record observations with no verdict.

use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};
use crate::graded::{binomial, Representation};
use crate::koszul::{betti_table, FullCohomology, SyzygyClassSpace};
use crate::models::{gen_canonical, gen_k3_g6, hyperplane_section, CanonicalModel, Variant};
use crate::pencils::{
    all_split_divisors, annihilator, enumerate_pencils, expected_pencils, Divisor,
};

/// Largest extension degree tried when a field turns out too small.
pub const MAX_EXTENSION_DEGREE: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Green,
    Geometric,
    Restriction,
    CrossModel,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::Green,
        Suite::Geometric,
        Suite::Restriction,
        Suite::CrossModel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Green => "green",
            Suite::Geometric => "geometric",
            Suite::Restriction => "restriction",
            Suite::CrossModel => "cross-model",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }

    /// Smallest characteristic for which the suite makes predictions.
    pub fn bound(self, genus: u32) -> u32 {
        let k = genus / 2;
        match self {
            Suite::Green => k + 2,
            Suite::Geometric => 7,
            Suite::Restriction | Suite::CrossModel => 5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub genus: u32,
    pub variant: Option<Variant>,
    pub divisors_per_pencil: usize,
    pub force: bool,
    pub timing: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            genus: 6,
            variant: None,
            divisors_per_pencil: 4,
            force: false,
            timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: Value,
    pub observed: Value,
    /// `None` for observations without a prediction.
    pub pass: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub field: FieldSpec,
    pub requested_p: u32,
    pub seed: u64,
    pub forced: bool,
    pub checks: Vec<Check>,
    /// Smaller fields tried first and why they were abandoned.
    pub escalations: Vec<String>,
    pub model: Value,
    pub elapsed_ms: Option<u64>,
}

impl SuiteReport {
    /// `Some(true)` if every check passed, `None` for forced runs.
    pub fn passed(&self) -> Option<bool> {
        if self.forced {
            None
        } else {
            Some(self.checks.iter().all(|c| c.pass == Some(true)))
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::MalformedFile(format!("report: {what}"));
        let s = |k: &str| {
            v.get(k)
                .and_then(Value::as_str)
                .map(String::from)
                .ok_or_else(|| bad(k))
        };
        let field: FieldSpec =
            serde_json::from_value(v.get("field").cloned().ok_or_else(|| bad("field"))?)
                .map_err(|_| bad("field"))?;
        let checks = v
            .get("checks")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("checks"))?
            .iter()
            .map(|c| {
                Ok(Check {
                    name: c
                        .get("name")
                        .and_then(Value::as_str)
                        .ok_or_else(|| bad("check name"))?
                        .into(),
                    expected: c.get("expected").cloned().unwrap_or(Value::Null),
                    observed: c.get("observed").cloned().unwrap_or(Value::Null),
                    pass: c.get("pass").and_then(Value::as_bool),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SuiteReport {
            suite: s("suite")?,
            requested_p: v
                .get("requested_p")
                .and_then(Value::as_u64)
                .unwrap_or(field.p as u64) as u32,
            field,
            seed: v
                .get("seed")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad("seed"))?,
            forced: v.get("forced").and_then(Value::as_bool).unwrap_or(false),
            checks,
            escalations: v
                .get("escalations")
                .and_then(Value::as_array)
                .map(|a| {
                    a.iter()
                        .filter_map(|x| x.as_str().map(String::from))
                        .collect()
                })
                .unwrap_or_default(),
            model: v.get("model").cloned().unwrap_or(Value::Null),
            elapsed_ms: v.get("elapsed_ms").and_then(Value::as_u64),
        })
    }

    /// Plain-text rendering, one line per check.
    pub fn render(&self) -> String {
        let mut s = format!(
            "suite {} over {} (seed {}){}\n",
            self.suite,
            self.field,
            self.seed,
            if self.forced {
                ", forced: observations only"
            } else {
                ""
            }
        );
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let verdict = match c.pass {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "----",
            };
            s += &format!(
                "  {verdict}  {:width$}  expected {}  observed {}\n",
                c.name, c.expected, c.observed
            );
        }
        for e in &self.escalations {
            s += &format!("  note: {e}\n");
        }
        s += match self.passed() {
            Some(true) => "result: pass\n",
            Some(false) => "result: FAIL\n",
            None => "result: no verdict\n",
        };
        s
    }
}

/// Accumulates checks; in forced mode predictions are dropped.
struct Checks {
    forced: bool,
    list: Vec<Check>,
}

impl Checks {
    fn new(forced: bool) -> Self {
        Checks {
            forced,
            list: Vec::new(),
        }
    }

    fn push<T: Serialize>(&mut self, name: impl Into<String>, expected: T, observed: T) {
        let expected = serde_json::to_value(expected).expect("serializable");
        let observed = serde_json::to_value(observed).expect("serializable");
        let (expected, pass) = if self.forced {
            (Value::Null, None)
        } else {
            let pass = expected == observed;
            (expected, Some(pass))
        };
        self.list.push(Check {
            name: name.into(),
            expected,
            observed,
            pass,
        });
    }

    fn all_pass(&self) -> bool {
        self.list.iter().all(|c| c.pass != Some(false))
    }
}

/// Runs `body` over `F_p`, then `F_{p^2}`, ... while it fails for reasons
/// that a larger field can fix.
pub fn with_field_escalation<T>(
    p: u32,
    mut body: impl FnMut(&Field) -> Result<T>,
) -> Result<(T, Field, Vec<String>)> {
    let mut notes = Vec::new();
    for m in 1..=MAX_EXTENSION_DEGREE {
        let spec = FieldSpec::extension(p, m)?;
        let field = match Field::new(spec) {
            Ok(f) => f,
            Err(Error::FieldTooLarge { .. }) => break,
            Err(e) => return Err(e),
        };
        match body(&field) {
            Ok(t) => return Ok((t, field, notes)),
            Err(e) if e.is_retryable() => notes.push(format!("{}: {e}", field.spec())),
            Err(e) => return Err(e),
        }
    }
    Err(Error::RetriesExhausted(format!(
        "no field of characteristic {p} worked: {}",
        notes.join("; ")
    )))
}

/// A seed derived from `seed` for a named sub-experiment.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    // FNV-1a over the label, mixed with the seed
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    (h ^ seed).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn check_bound(suite: Suite, p: u32, genus: u32, force: bool) -> Result<()> {
    let bound = suite.bound(genus);
    if p < bound && !force {
        return Err(Error::BelowCharacteristicBound {
            suite: suite.name().into(),
            p,
            bound,
        });
    }
    Ok(())
}

fn provenance(model: &CanonicalModel) -> Value {
    json!({
        "construction": model.construction(),
        "field": model.field().spec(),
        "seed": model.meta().seed,
        "attempts": model.meta().attempts,
        "genus": model.genus(),
    })
}

/// Provenance when everything passed; the full models otherwise.
fn attach(models: &[(&str, &CanonicalModel)], all_pass: bool) -> Value {
    let map: serde_json::Map<String, Value> = models
        .iter()
        .map(|(k, m)| {
            let v = if all_pass { provenance(m) } else { m.to_json() };
            (k.to_string(), v)
        })
        .collect();
    Value::Object(map)
}

fn q1_row(model: &CanonicalModel, rep: Representation, p_max: i64) -> Result<Vec<usize>> {
    let ring = model.ring(rep)?;
    Ok(betti_table(&ring, (0, p_max), (1, 1))?.grid.remove(0))
}

struct Outcome {
    checks: Checks,
    model: Value,
}

fn finish(
    suite: Suite,
    p: u32,
    seed: u64,
    opts: &SuiteOptions,
    start: Instant,
    result: (Outcome, Field, Vec<String>),
) -> SuiteReport {
    let (out, field, escalations) = result;
    SuiteReport {
        suite: suite.name().into(),
        field: field.spec().clone(),
        requested_p: p,
        seed,
        forced: opts.force,
        checks: out.checks.list,
        escalations,
        model: out.model,
        elapsed_ms: opts.timing.then(|| start.elapsed().as_millis() as u64),
    }
}

/// Vanishing `b_{k,1} = 0` and `b_{k-1,1} = binom(2k-1, k-2)` for a
/// canonical curve of genus `2k`.
pub fn suite_green(p: u32, seed: u64, opts: &SuiteOptions) -> Result<SuiteReport> {
    let start = Instant::now();
    let g = opts.genus;
    if !matches!(g, 4 | 6 | 8) {
        return Err(Error::InvalidArgument(format!(
            "genus must be 4, 6 or 8, got {g}"
        )));
    }
    check_bound(Suite::Green, p, g, opts.force)?;
    let variant = opts
        .variant
        .unwrap_or_else(|| crate::models::default_variant(g));
    let k = (g / 2) as i64;
    let result = with_field_escalation(p, |field| {
        let model = gen_canonical(g, variant, field, seed)?;
        let ring = model.ring(Representation::Presentation)?;
        let table = betti_table(&ring, (k - 1, k), (1, 1))?;
        let mut checks = Checks::new(opts.force);
        checks.push(
            format!("b_{{{},1}}", k - 1),
            binomial(2 * k as usize - 1, k as usize - 2),
            table.get(k - 1, 1).expect("in range"),
        );
        checks.push(
            format!("b_{{{k},1}}"),
            0,
            table.get(k, 1).expect("in range"),
        );
        let model_json = attach(&[("curve", &model)], checks.all_pass());
        Ok(Outcome {
            checks,
            model: model_json,
        })
    })?;
    Ok(finish(Suite::Green, p, seed, opts, start, result))
}

fn pairwise_disjoint(divs: &[Divisor]) -> bool {
    divs.iter().enumerate().all(|(i, a)| {
        divs[i + 1..].iter().all(|b| {
            a.points
                .iter()
                .all(|(x, _)| b.points.iter().all(|(y, _)| x != y))
        })
    })
}

/// Pencil divisors, their special subspaces and the images of the
/// corresponding subspace syzygies in `K_{2,1}` of a sextic-built curve.
pub fn suite_geometric(p: u32, seed: u64, opts: &SuiteOptions) -> Result<SuiteReport> {
    let start = Instant::now();
    check_bound(Suite::Geometric, p, 6, opts.force)?;
    let n = opts.divisors_per_pencil;
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "at least 3 divisors per pencil are needed, got {n}"
        )));
    }
    let result = with_field_escalation(p, |field| {
        let model = gen_canonical(6, Variant::Sextic, field, seed)?;
        let sextic = model
            .plane_model()?
            .expect("sextic construction keeps its plane model");
        let pencils = enumerate_pencils(&sextic)?;
        let divisors = all_split_divisors(&sextic, &pencils, n, derive_seed(seed, "divisors"))?;
        let ring = model.ring(Representation::Presentation)?;
        let full = FullCohomology::new(&ring, 2, 1)?;

        let mut checks = Checks::new(opts.force);
        checks.push("pencils", expected_pencils(3) as usize, pencils.len());
        let degrees: Vec<usize> = divisors.iter().flatten().map(Divisor::degree).collect();
        checks.push("divisor degrees", vec![4; degrees.len()], degrees);
        let bpf = divisors.iter().filter(|ds| pairwise_disjoint(ds)).count();
        checks.push("base-point-free pencils", pencils.len(), bpf);

        let mut specials = Vec::new();
        for ds in &divisors {
            let mut row = Vec::new();
            for d in ds {
                let pts: Vec<_> = d.points.iter().map(|(x, _)| x.clone()).collect();
                row.push(annihilator(&sextic, &pts)?);
            }
            specials.push(row);
        }
        let dims: Vec<usize> = specials.iter().flatten().map(|w| w.dim()).collect();
        checks.push("special subspace dims", vec![3; dims.len()], dims);
        let distinct = specials
            .iter()
            .filter(|ws| {
                ws.iter()
                    .enumerate()
                    .all(|(i, a)| ws[i + 1..].iter().all(|b| a != b))
            })
            .count();
        checks.push(
            "pencils with distinct special subspaces",
            pencils.len(),
            distinct,
        );

        checks.push("dim K_{2,1}", 5, full.dim());
        let images: Vec<Vec<SyzygyClassSpace>> = specials
            .iter()
            .map(|ws| {
                ws.iter()
                    .map(|w| full.image_of(&ring, w))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let first3: Vec<&SyzygyClassSpace> = images.iter().flat_map(|im| &im[..3]).collect();
        let d3: Vec<usize> = first3.iter().map(|s| s.dim()).collect();
        checks.push("image dims, 3 parameters per pencil", vec![1; d3.len()], d3);
        let dall: Vec<usize> = images.iter().flatten().map(|s| s.dim()).collect();
        checks.push("image dims, all parameters", vec![1; dall.len()], dall);
        checks.push(
            "span of images, 3 parameters per pencil",
            full.dim(),
            SyzygyClassSpace::span_dim(first3.iter().copied())?,
        );
        let span3: Vec<usize> = images
            .iter()
            .map(|im| SyzygyClassSpace::span_dim(&im[..3]))
            .collect::<Result<_>>()?;
        checks.push("per-pencil span, 3 parameters", vec![2; span3.len()], span3);
        if n > 3 {
            let span_all: Vec<usize> = images
                .iter()
                .map(SyzygyClassSpace::span_dim)
                .collect::<Result<_>>()?;
            checks.push(
                "per-pencil span, all parameters",
                vec![2; span_all.len()],
                span_all,
            );
        }
        let mut cross_pairs = 0;
        let mut distinct_pairs = 0;
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                for a in &images[i] {
                    for b in &images[j] {
                        cross_pairs += 1;
                        if SyzygyClassSpace::span_dim([a, b])? == 2 {
                            distinct_pairs += 1;
                        }
                    }
                }
            }
        }
        checks.push(
            "distinct images across pencils",
            cross_pairs,
            distinct_pairs,
        );

        let mut model_json = attach(&[("curve", &model)], checks.all_pass());
        model_json["divisors"] = divisors
            .iter()
            .flatten()
            .map(|d| d.to_json(field))
            .collect();
        model_json["pencils"] = pencils.iter().map(|p| p.to_json(field)).collect();
        Ok(Outcome {
            checks,
            model: model_json,
        })
    })?;
    Ok(finish(Suite::Geometric, p, seed, opts, start, result))
}

/// `b_{p,1}` of the genus-6 K3 surface against a hyperplane section.
pub fn suite_restriction(p: u32, seed: u64, opts: &SuiteOptions) -> Result<SuiteReport> {
    let start = Instant::now();
    check_bound(Suite::Restriction, p, 6, opts.force)?;
    let result = with_field_escalation(p, |field| {
        let k3 = gen_k3_g6(field, seed)?;
        let curve = hyperplane_section(&k3, derive_seed(seed, "section"))?;
        let rx = q1_row(&k3, Representation::Presentation, 3)?;
        let rc = q1_row(&curve, Representation::Presentation, 3)?;
        let mut checks = Checks::new(opts.force);
        for (pp, want) in [(1usize, 6usize), (2, 5), (3, 0)] {
            checks.push(format!("b_{{{pp},1}}(X)"), want, rx[pp]);
            checks.push(format!("b_{{{pp},1}}(C)"), want, rc[pp]);
            checks.push(format!("b_{{{pp},1}}(X) = b_{{{pp},1}}(C)"), rx[pp], rc[pp]);
        }
        let model = attach(&[("surface", &k3), ("section", &curve)], checks.all_pass());
        Ok(Outcome { checks, model })
    })?;
    Ok(finish(Suite::Restriction, p, seed, opts, start, result))
}

/// Hilbert values and the `q = 1` Betti row of a genus-6 curve, for both
/// constructions in both representations.
pub fn suite_cross_model(p: u32, seed: u64, opts: &SuiteOptions) -> Result<SuiteReport> {
    let start = Instant::now();
    check_bound(Suite::CrossModel, p, 6, opts.force)?;
    let result = with_field_escalation(p, |field| {
        let mut grass = gen_canonical(6, Variant::Grass, field, seed)?;
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(derive_seed(
            seed,
            "grass-points",
        ));
        grass.attach_section_points(3, &mut rng)?;
        grass.validate()?;
        let sextic = gen_canonical(6, Variant::Sextic, field, seed)?;
        let mut checks = Checks::new(opts.force);
        let mut rows = Vec::new();
        for (name, model) in [("grass", &grass), ("sextic", &sextic)] {
            for rep in [Representation::Presentation, Representation::Evaluation] {
                let label = match rep {
                    Representation::Presentation => "presentation",
                    Representation::Evaluation => "evaluation",
                };
                let ring = model.ring(rep)?;
                for (q, want) in [(1usize, 6usize), (2, 15), (3, 25)] {
                    checks.push(
                        format!("{name}/{label} dim M_{q}"),
                        want,
                        ring.dim(q as i64)?,
                    );
                }
                let row = q1_row(model, rep, 3)?;
                checks.push(
                    format!("{name}/{label} Betti row q=1"),
                    vec![0, 6, 5, 0],
                    row.clone(),
                );
                rows.push(row);
            }
        }
        let agree = rows.iter().filter(|r| **r == rows[0]).count();
        checks.push("combinations agreeing on the Betti row", rows.len(), agree);
        let model = attach(&[("grass", &grass), ("sextic", &sextic)], checks.all_pass());
        Ok(Outcome { checks, model })
    })?;
    Ok(finish(Suite::CrossModel, p, seed, opts, start, result))
}

pub fn run_suite(suite: Suite, p: u32, seed: u64, opts: &SuiteOptions) -> Result<SuiteReport> {
    match suite {
        Suite::Green => suite_green(p, seed, opts),
        Suite::Geometric => suite_geometric(p, seed, opts),
        Suite::Restriction => suite_restriction(p, seed, opts),
        Suite::CrossModel => suite_cross_model(p, seed, opts),
    }
}
