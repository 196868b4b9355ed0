//! Acceptance gate: one PASS/FAIL line per criterion, exact integers only.
//!
//! Run with `cargo test -p koszul-lab --test acceptance`.

use std::time::{Duration, Instant};

use koszul_lab::field::{Field, FieldSpec};
use koszul_lab::graded::{
    substitute_linear, CoordinateRing, Generator, PresentationModel, Representation,
};
use koszul_lab::koszul::{betti_table, KoszulCell};
use koszul_lab::linalg::{Mat, Subspace};
use koszul_lab::models::{gen_canonical, Variant};
use koszul_lab::verify::{
    suite_cross_model, suite_geometric, suite_green, suite_restriction, SuiteOptions, SuiteReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

struct Outcome {
    pass: bool,
    detail: String,
}

fn timed(limit_s: u64, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(limit_s) {
        out.pass = false;
        out.detail += &format!("; took {:.1} s, limit {limit_s} s", elapsed.as_secs_f64());
    }
    out
}

fn observed(r: &SuiteReport, name: &str) -> serde_json::Value {
    r.check(name)
        .unwrap_or_else(|| panic!("{} has no check {name:?}", r.suite))
        .observed
        .clone()
}

fn green(p: u32, seed: u64, genus: u32, variant: Variant) -> SuiteReport {
    let opts = SuiteOptions {
        genus,
        variant: Some(variant),
        ..Default::default()
    };
    suite_green(p, seed, &opts).expect("green suite runs")
}

fn criterion_1() -> Outcome {
    let mut bad = Vec::new();
    let mut runs = 0;
    let mut slowest = Duration::ZERO;
    for variant in [Variant::Grass, Variant::Sextic] {
        for p in [7, 101] {
            for seed in 1..=3 {
                let start = Instant::now();
                let r = green(p, seed, 6, variant);
                slowest = slowest.max(start.elapsed());
                runs += 1;
                if observed(&r, "b_{3,1}") != json!(0) {
                    bad.push(format!(
                        "{variant} p={p} seed={seed}: {}",
                        observed(&r, "b_{3,1}")
                    ));
                }
            }
        }
    }
    let in_time = slowest < Duration::from_secs(10);
    Outcome {
        pass: bad.is_empty() && in_time,
        detail: format!(
            "b_{{3,1}} = 0 in {}/{runs} runs, slowest {:.2} s{}",
            runs - bad.len(),
            slowest.as_secs_f64(),
            if bad.is_empty() {
                String::new()
            } else {
                format!("; {}", bad.join(", "))
            }
        ),
    }
}

fn criterion_2() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for p in [11, 101] {
        let r6 = green(p, 1, 6, Variant::Grass);
        let b21 = observed(&r6, "b_{2,1}");
        pass &= b21 == json!(5);
        let start = Instant::now();
        let r8 = green(p, 1, 8, Variant::Grass);
        let t8 = start.elapsed();
        let (b31, b41) = (observed(&r8, "b_{3,1}"), observed(&r8, "b_{4,1}"));
        pass &= b31 == json!(21) && b41 == json!(0) && t8 < Duration::from_secs(60);
        notes.push(format!(
            "p={p}: g6 b21={b21}, g8 b31={b31} b41={b41} ({:.2} s)",
            t8.as_secs_f64()
        ));
    }
    Outcome {
        pass,
        detail: notes.join("; "),
    }
}

fn criterion_3() -> Outcome {
    timed(2, || {
        let f = Field::prime(101).unwrap();
        let mut rows = Vec::new();
        for seed in 1..=3 {
            let m = gen_canonical(4, Variant::Ci, &f, seed).unwrap();
            let ring = m.ring(Representation::Presentation).unwrap();
            rows.push(betti_table(&ring, (1, 2), (1, 1)).unwrap().grid.remove(0));
        }
        Outcome {
            pass: rows.iter().all(|r| *r == [1, 0]),
            detail: format!("(b_{{1,1}}, b_{{2,1}}) over 3 seeds: {rows:?}"),
        }
    })
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for p in [7, 101] {
        let start = Instant::now();
        let r = suite_restriction(p, 1, &SuiteOptions::default()).expect("restriction suite runs");
        let t = start.elapsed();
        let xs: Vec<_> = (1..=3)
            .map(|i| observed(&r, &format!("b_{{{i},1}}(X)")))
            .collect();
        let cs: Vec<_> = (1..=3)
            .map(|i| observed(&r, &format!("b_{{{i},1}}(C)")))
            .collect();
        pass &= xs == cs && xs == [json!(6), json!(5), json!(0)] && t < Duration::from_secs(30);
        notes.push(format!("{}: X {}, C {}", r.field, json!(xs), json!(cs)));
    }
    Outcome {
        pass,
        detail: notes.join("; "),
    }
}

/// Geometric suite runs shared by criteria 5 to 8.
struct Geometric {
    reports: Vec<(SuiteReport, Duration)>,
}

impl Geometric {
    fn run() -> Self {
        let reports = [7, 101]
            .into_iter()
            .map(|p| {
                let start = Instant::now();
                let r =
                    suite_geometric(p, 1, &SuiteOptions::default()).expect("geometric suite runs");
                (r, start.elapsed())
            })
            .collect();
        Geometric { reports }
    }

    /// Every named check equals the given value in every run, within 60 s.
    fn judge(&self, names: &[&str], want: impl Fn(&str) -> serde_json::Value) -> Outcome {
        let mut pass = true;
        let mut notes = Vec::new();
        for (r, t) in &self.reports {
            pass &= *t < Duration::from_secs(60);
            let mut parts = Vec::new();
            for n in names {
                let o = observed(r, n);
                pass &= o == want(n);
                parts.push(format!("{n} = {o}"));
            }
            notes.push(format!("{}: {}", r.field, parts.join(", ")));
        }
        Outcome {
            pass,
            detail: notes.join("; "),
        }
    }
}

fn criterion_5(g: &Geometric) -> Outcome {
    g.judge(
        &[
            "pencils",
            "divisor degrees",
            "base-point-free pencils",
            "special subspace dims",
        ],
        |n| match n {
            "pencils" | "base-point-free pencils" => json!(5),
            "divisor degrees" => json!(vec![4; 20]),
            _ => json!(vec![3; 20]),
        },
    )
}

fn criterion_6(g: &Geometric) -> Outcome {
    g.judge(&["image dims, 3 parameters per pencil"], |_| {
        json!(vec![1; 15])
    })
}

fn criterion_7(g: &Geometric) -> Outcome {
    g.judge(
        &["dim K_{2,1}", "span of images, 3 parameters per pencil"],
        |_| json!(5),
    )
}

fn criterion_8(g: &Geometric) -> Outcome {
    g.judge(
        &[
            "per-pencil span, 3 parameters",
            "per-pencil span, all parameters",
        ],
        |_| json!(vec![2; 5]),
    )
}

fn criterion_9() -> Outcome {
    timed(60, || {
        let mut pass = true;
        let mut notes = Vec::new();
        for p in [7, 101] {
            let r =
                suite_cross_model(p, 1, &SuiteOptions::default()).expect("cross-model suite runs");
            let mut rows = Vec::new();
            for model in ["grass", "sextic"] {
                for rep in ["presentation", "evaluation"] {
                    let dims: Vec<_> = (1..=3)
                        .map(|q| observed(&r, &format!("{model}/{rep} dim M_{q}")))
                        .collect();
                    pass &= dims == [json!(6), json!(15), json!(25)];
                    let row = observed(&r, &format!("{model}/{rep} Betti row q=1"));
                    pass &= row == json!([0, 6, 5, 0]);
                    rows.push(row);
                }
            }
            notes.push(format!("{}: rows {}", r.field, json!(rows)));
        }
        Outcome {
            pass,
            detail: notes.join("; "),
        }
    })
}

fn random_mat(f: &Field, r: usize, c: usize, rng: &mut ChaCha8Rng) -> Mat {
    let density = rng.gen_range(0.1..=1.0);
    Mat::from_fn(f, r, c, |_, _| {
        if rng.gen_bool(density) {
            f.random(rng)
        } else {
            f.zero()
        }
    })
}

fn change_coordinates(model: &PresentationModel, p: &Mat) -> PresentationModel {
    let gens = model
        .generators
        .iter()
        .map(|g| Generator {
            degree: g.degree,
            coeffs: substitute_linear(&model.field, &g.coeffs, g.degree, p),
        })
        .collect();
    let mut changed = PresentationModel::new(&model.field, model.n, gens).unwrap();
    changed.expected_hilbert = model.expected_hilbert.clone();
    changed
}

fn criterion_10() -> Outcome {
    timed(120, || {
        let mut failures = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(10);

        // linear algebra identities on 1000 random matrices
        let fields = [
            Field::prime(7).unwrap(),
            Field::prime(101).unwrap(),
            Field::new(FieldSpec::extension(7, 3).unwrap()).unwrap(),
        ];
        let mut bad_lin = 0;
        for i in 0..1000 {
            let f = &fields[i % fields.len()];
            let (r, c) = (rng.gen_range(0..10), rng.gen_range(1..10));
            let a = random_mat(f, r, c, &mut rng);
            let b = random_mat(f, rng.gen_range(0..10), c, &mut rng);
            let ok_rank =
                a.rank() == a.transpose().rank() && a.rank() + a.kernel_basis().dim() == c;
            let (u, w) = (a.row_space(), b.row_space());
            let (sum, cap) = (u.sum(&w).unwrap(), u.intersect(&w).unwrap());
            let ok_lattice = sum.dim() + cap.dim() == u.dim() + w.dim()
                && sum.contains(&u).unwrap()
                && u.contains(&cap).unwrap()
                && w.contains(&cap).unwrap();
            if !(ok_rank && ok_lattice) {
                bad_lin += 1;
            }
        }
        if bad_lin > 0 {
            failures.push(format!("{bad_lin}/1000 matrices broke an identity"));
        }

        // delta o delta = 0 on every cell of the genus 4 and 6 complexes,
        // for the full space and random subspaces
        let f = Field::prime(101).unwrap();
        let mut cells = 0;
        let mut defects = 0;
        for (g, variant) in [
            (4u32, Variant::Ci),
            (6, Variant::Grass),
            (6, Variant::Sextic),
        ] {
            let model = gen_canonical(g, variant, &f, 1).unwrap();
            let ring = model.ring(Representation::Presentation).unwrap();
            let n = g as usize;
            let mut spaces = vec![Subspace::full(&f, n)];
            for d in [2, n - 1] {
                let rows = (0..d)
                    .map(|_| (0..n).map(|_| f.random(&mut rng)).collect())
                    .collect();
                spaces.push(Subspace::from_rows(&f, n, rows).unwrap());
            }
            for w in &spaces {
                for p in 0..=w.dim() as i64 {
                    for q in 0..=2 {
                        cells += 1;
                        match KoszulCell::build(&ring, w, p, q) {
                            Ok(c) if c.delta_out.nrows() == 0 || c.delta_in.ncols() == 0 => {}
                            Ok(c) if c.delta_out.mul(&c.delta_in).unwrap().is_zero() => {}
                            _ => defects += 1,
                        }
                    }
                }
            }
        }
        if defects > 0 {
            failures.push(format!("{defects}/{cells} cells with nonzero composite"));
        }

        // Betti tables unchanged by 5 random coordinate changes
        let mut changes_ok = 0;
        for (g, variant) in [(4u32, Variant::Ci), (6, Variant::Grass)] {
            let model = gen_canonical(g, variant, &f, 2).unwrap();
            let gi = g as i64;
            let table = |pm: &PresentationModel| {
                betti_table(&CoordinateRing::presentation(pm), (0, gi - 2), (0, 2))
                    .unwrap()
                    .grid
            };
            let base = table(&model.presentation);
            for _ in 0..5 {
                let p = loop {
                    let m = Mat::from_fn(&f, g as usize, g as usize, |_, _| f.random(&mut rng));
                    if m.rank() == g as usize {
                        break m;
                    }
                };
                if table(&change_coordinates(&model.presentation, &p)) == base {
                    changes_ok += 1;
                }
            }
        }
        if changes_ok != 10 {
            failures.push(format!(
                "{changes_ok}/10 coordinate changes preserved the table"
            ));
        }

        // duality b_{p,1} = b_{g-2-p,2}
        let mut dual_bad = Vec::new();
        for (g, variant) in [
            (4u32, Variant::Ci),
            (6, Variant::Grass),
            (6, Variant::Sextic),
        ] {
            let model = gen_canonical(g, variant, &f, 3).unwrap();
            let ring = model.ring(Representation::Presentation).unwrap();
            let gi = g as i64;
            let t = betti_table(&ring, (0, gi - 2), (1, 2)).unwrap();
            for p in 0..=gi - 2 {
                if t.get(p, 1) != t.get(gi - 2 - p, 2) {
                    dual_bad.push(format!("g={g} {variant} p={p}"));
                }
            }
        }
        if !dual_bad.is_empty() {
            failures.push(format!("duality fails at {}", dual_bad.join(", ")));
        }

        Outcome {
            pass: failures.is_empty(),
            detail: if failures.is_empty() {
                format!("1000 matrices, {cells} cells, 10 coordinate changes, duality at g=4,6")
            } else {
                failures.join("; ")
            },
        }
    })
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "Green vanishing at genus 6", criterion_1()),
        (2, "dimension formula at genus 6 and 8", criterion_2()),
        (3, "genus 4 edge case", criterion_3()),
        (4, "hyperplane restriction", criterion_4()),
    ];
    let start = Instant::now();
    let geometric = Geometric::run();
    let t = start.elapsed();
    results.push((5, "pencil count and regularity", criterion_5(&geometric)));
    results.push((6, "one-dimensional images", criterion_6(&geometric)));
    results.push((7, "images generate K_{2,1}", criterion_7(&geometric)));
    results.push((
        8,
        "collinearity of images per pencil",
        criterion_8(&geometric),
    ));
    results.push((
        9,
        "representation and construction agreement",
        criterion_9(),
    ));
    results.push((10, "property suites", criterion_10()));

    println!("geometric suite runs took {:.2} s", t.as_secs_f64());
    for (i, name, o) in &results {
        println!(
            "criterion {i:>2} {}: {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
