//! Acceptance suite: one PASS/FAIL line per criterion, then a nonzero exit
//! status if any criterion failed.
//!
//! Run with `cargo test --release -p fce-validation --test acceptance`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use fce_bench::cases::{catalog, manufactured_residual};
use fce_bench::runner::{prepare, run_case, Overrides, RunRecord};
use fce_bench::sweep::{sweep, SweepAxis};
use fce_bench::find_case;
use fce_core::basis::Jet;
use fce_core::constraints::Enforcement;
use fce_core::fce1d::{build_field_1d, Partition1D};
use fce_core::fce2d::{build_field_2d, Mesh2D};
use fce_core::field::{BasisFamily, FceKind, Field};
use fce_core::solver::{CollocationKind, LeastSquaresProblem};
use fce_core::tfc::{
    bivariate_lift_c0, bivariate_lift_c1, build_constrained_expression, EdgeTraces, Jet2, PointConstraint,
    PointOp, Rect,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Reference error levels must be met within this factor.
const LEVEL_FACTOR: f64 = 5.0;

struct Outcome {
    pass: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { pass: true, notes: Vec::new() }
    }

    /// Records one sub-check; any failing sub-check fails the criterion.
    fn check(&mut self, ok: bool, note: String) {
        self.pass &= ok;
        self.notes.push(format!("{} {note}", if ok { "ok  " } else { "FAIL" }));
    }

    fn info(&mut self, note: String) {
        self.notes.push(format!("info {note}"));
    }

    fn run(&mut self, id: &str, o: Overrides) -> Option<RunRecord> {
        match run_case(id, &o) {
            Ok(r) => Some(r),
            Err(e) => {
                self.check(false, format!("{id} {o:?}: {e}"));
                None
            }
        }
    }

    /// Checks `value <= factor * target` and reports the ratio.
    fn near(&mut self, label: &str, value: f64, target: f64) {
        let ratio = value / target;
        self.check(value <= LEVEL_FACTOR * target, format!("{label}: {value:.3e} vs {target:.3e} (ratio {ratio:.2})"));
    }
}

fn o() -> Overrides {
    Overrides::default()
}

fn kinds() -> [FceKind; 3] {
    [FceKind::C1, FceKind::C0, FceKind::Nc]
}

fn ac1() -> Outcome {
    let mut out = Outcome::new();
    for kind in kinds() {
        for (p, target) in [(5, 6.63e-7), (6, 1.59e-8)] {
            if let Some(r) = out.run("helmholtz1d", Overrides { kind: Some(kind), nx: Some(4), p: Some(p), ..o() }) {
                out.near(&format!("{} p={p} l2", kind.name()), r.l2, target);
                out.info(format!("{} p={p} linf {:.3e}", kind.name(), r.linf));
            }
        }
    }
    let uni = Overrides { nx: Some(4), p: Some(6), colloc: Some(CollocationKind::Uniform), ..o() };
    if let Some(r) = out.run("helmholtz1d", uni) {
        out.near("c1 uniform p=6 l2", r.l2, 5.01e-7);
        out.info(format!("c1 uniform p=6 linf {:.3e}", r.linf));
    }
    out
}

fn ac2() -> Outcome {
    let mut out = Outcome::new();
    let base = Overrides { kind: Some(FceKind::C0), nx: Some(4), p: Some(5), ..o() };
    if let Some(r) = out.run("ivp1d", base) {
        out.near("c0 N=4 p=5 linf", r.linf, 1.08e-7);
        out.near("c0 N=4 p=5 l2", r.l2, 2.21e-7);
    }
    if let Some(r) = out.run("ivp1d", Overrides { nx: Some(8), ..base }) {
        out.info(format!("c0 N=8 p=5 linf {:.3e} l2 {:.3e}", r.linf, r.l2));
    }
    out
}

fn ac3() -> Outcome {
    let mut out = Outcome::new();
    let ns = [2, 4, 8, 16, 32];
    for p in [2usize, 3, 4] {
        let ov = Overrides { kind: Some(FceKind::C1), p: Some(p), ..o() };
        match sweep("helmholtz1d", SweepAxis::H, &ns, &ov) {
            Ok(rep) => {
                let failed: Vec<_> = rep.points.iter().filter_map(|pt| pt.error.clone()).collect();
                if let Some(e) = failed.first() {
                    out.check(false, format!("p={p}: {e}"));
                    continue;
                }
                let slope = rep.rate_linf.unwrap_or(f64::NAN);
                let want = (p + 1) as f64;
                out.check((slope - want).abs() <= 0.3, format!("p={p} slope {slope:.3} (want {want} ± 0.3)"));
            }
            Err(e) => out.check(false, format!("p={p}: {e}")),
        }
    }
    out
}

fn ac4() -> Outcome {
    let mut out = Outcome::new();
    let targets = [1.0, 4.05e-11, 1.18e-10, 7.30e-10];
    for p in [5usize, 7, 9, 11] {
        let mut errs = Vec::new();
        for kind in kinds() {
            let ov = Overrides { kind: Some(kind), nx: Some(2), ny: Some(1), p: Some(p), ..o() };
            if let Some(r) = out.run("helmholtz2d", ov) {
                errs.push(r.linf);
            }
        }
        if errs.len() < 3 {
            continue;
        }
        out.check(
            errs[0] <= errs[1] && errs[1] <= errs[2],
            format!("p={p} ordering c1 {:.3e} <= c0 {:.3e} <= nc {:.3e}", errs[0], errs[1], errs[2]),
        );
        if p == 11 {
            for (k, kind) in kinds().iter().enumerate() {
                out.near(&format!("{} p=11 linf", kind.name()), errs[k], targets[k + 1]);
            }
        }
    }
    out
}

fn ac5() -> Outcome {
    let mut out = Outcome::new();
    let ov = Overrides { kind: Some(FceKind::C0), nx: Some(8), ny: Some(8), p: Some(6), ..o() };
    if let Some(r) = out.run("helmholtz2d", ov) {
        out.near("c0 (8,8) p=6 linf", r.linf, 1.02e-9);
    }
    out
}

fn ac6() -> Outcome {
    let mut out = Outcome::new();
    for n in [4usize, 8] {
        for kind in [FceKind::C0, FceKind::Nc] {
            for p in 3..=6 {
                let ov = Overrides { kind: Some(kind), nx: Some(n), ny: Some(n), p: Some(p), ..o() };
                let gll = out.run("advection2d", ov);
                let uni = out.run("advection2d", Overrides { colloc: Some(CollocationKind::Uniform), ..ov });
                let (Some(g), Some(u)) = (gll, uni) else { continue };
                out.check(
                    g.linf < u.linf,
                    format!("({n},{n}) {} p={p} gll {:.3e} < uniform {:.3e}", kind.name(), g.linf, u.linf),
                );
                if n == 8 && p == 6 {
                    let target = if kind == FceKind::C0 { 5.35e-10 } else { 9.05e-10 };
                    out.near(&format!("(8,8) {} p=6 linf", kind.name()), g.linf, target);
                }
            }
        }
    }
    out
}

fn h_rate(out: &mut Outcome, id: &str, kind: FceKind, p: usize, want: f64) {
    let ov = Overrides { kind: Some(kind), p: Some(p), ..o() };
    match sweep(id, SweepAxis::H, &[5, 10, 20, 40], &ov) {
        Ok(rep) => {
            let slope = rep.rate_linf.unwrap_or(f64::NAN);
            out.check((slope - want).abs() <= 0.4, format!("{id} {} p={p} h-rate {slope:.3} (want {want} ± 0.4)", kind.name()));
        }
        Err(e) => out.check(false, format!("{id} p={p}: {e}")),
    }
}

fn ac7() -> Outcome {
    let mut out = Outcome::new();
    let at = |kind| Overrides { kind: Some(kind), nx: Some(5), p: Some(11), ..o() };
    if let Some(r) = out.run("sin-poisson1d", at(FceKind::C1)) {
        out.check(r.linf <= 5e-12, format!("sin-poisson1d c1 p=11 linf {:.3e} <= 5e-12", r.linf));
    }
    if let Some(r) = out.run("sin-poisson1d", at(FceKind::C0)) {
        out.near("sin-poisson1d c0 p=11 linf", r.linf, 5.96e-10);
    }
    if let Some(r) = out.run("sin-poisson1d", at(FceKind::Nc)) {
        out.near("sin-poisson1d nc p=11 linf", r.linf, 6.46e-7);
    }
    if let Some(r) = out.run("sin-ivp1d", at(FceKind::C0)) {
        out.near("sin-ivp1d c0 p=11 linf", r.linf, 2.56e-11);
    }
    for p in [2, 3, 4] {
        h_rate(&mut out, "sin-poisson1d", FceKind::C1, p, 3.0);
    }
    for p in [2, 3, 4] {
        h_rate(&mut out, "sin-ivp1d", FceKind::C0, p, 2.0);
    }
    out
}

/// Errors at consecutive orders may grow by at most this factor.
const MONOTONE_SLACK: f64 = 2.0;

fn decays(errs: &[(usize, f64)]) -> bool {
    errs.windows(2).all(|w| w[1].1 <= MONOTONE_SLACK * w[0].1)
}

fn fmt_errs(errs: &[(usize, f64)]) -> String {
    errs.iter().map(|(p, e)| format!("{p}:{e:.2e}")).collect::<Vec<_>>().join(" ")
}

/// Maximum constraint residual tolerated in exact mode.
const CONSTRAINT_TOL: f64 = 1e-11;

fn probe_constraint(out: &mut Outcome, label: &str, r: &RunRecord) {
    match r.constraint_residual {
        Some(c) => out.check(c <= CONSTRAINT_TOL, format!("{label} p={} constraint residual {c:.2e}", r.p)),
        None => out.check(false, format!("{label} p={} has no constraint probe", r.p)),
    }
}

fn ac8() -> Outcome {
    let mut out = Outcome::new();

    let mut lin = Vec::new();
    for p in 4..=10 {
        if let Some(r) = out.run("relbc1d-linear", Overrides { nx: Some(2), p: Some(p), ..o() }) {
            probe_constraint(&mut out, "relbc1d-linear", &r);
            lin.push((p, r.linf));
        }
    }
    let last = lin.last().map_or(f64::NAN, |e| e.1);
    out.check(decays(&lin) && last <= 1e-10, format!("relbc1d-linear p-decay to {last:.2e} <= 1e-10 [{}]", fmt_errs(&lin)));

    let mut nl = Vec::new();
    for p in 5..=12 {
        if let Some(r) = out.run("relbc1d-nonlinear", Overrides { nx: Some(2), p: Some(p), ..o() }) {
            probe_constraint(&mut out, "relbc1d-nonlinear", &r);
            nl.push((p, r.linf));
        }
    }
    let best = nl.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    let upto10: Vec<_> = nl.iter().copied().filter(|e| e.0 <= 10).collect();
    out.check(
        decays(&upto10) && best <= 1e-9,
        format!("relbc1d-nonlinear p-decay, best {best:.2e} <= 1e-9 [{}]", fmt_errs(&nl)),
    );

    for p in [7usize, 9, 11] {
        let ov = Overrides { p: Some(p), ..o() };
        let exact = out.run("relbc2d", Overrides { relative: Some(Enforcement::Exact), ..ov });
        let approx = out.run("relbc2d", Overrides { relative: Some(Enforcement::LeastSquares), ..ov });
        let (Some(e), Some(a)) = (exact, approx) else { continue };
        probe_constraint(&mut out, "relbc2d exact", &e);
        let ratio = a.linf / e.linf;
        out.check(
            ratio >= 10.0,
            format!("relbc2d p={p} exact {:.3e} vs approx {:.3e} (ratio {ratio:.1} >= 10)", e.linf, a.linf),
        );
    }
    out
}

/// Samples `n` points strictly inside `(a, b)`.
fn interior(rng: &mut ChaCha8Rng, a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|_| a + (b - a) * rng.random_range(0.01..0.99)).collect()
}

fn continuity_1d(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst: f64 = 0.0;
    for kind in [FceKind::C0, FceKind::C1] {
        let part = Partition1D::new(vec![0.0, 0.3, 0.45, 1.0, 1.7]).unwrap();
        let basis = BasisFamily::Legendre.kind_for(kind.blend(0));
        let field = build_field_1d(part, kind, basis, 6, &HashMap::new()).unwrap();
        let order = kind.continuity(0).unwrap();
        for _ in 0..100 {
            let theta: Vec<f64> = (0..field.n_free()).map(|_| rng.random_range(-1.0..1.0)).collect();
            for e in 1..field.n_elements() {
                let x = field.element_bounds(e)[0];
                for k in 0..=order {
                    let l = field.form(e - 1, [x, 0.0]).component(k, 0).eval(&theta);
                    let r = field.form(e, [x, 0.0]).component(k, 0).eval(&theta);
                    worst = worst.max((l - r).abs());
                }
            }
        }
    }
    worst
}

fn continuity_2d(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst: f64 = 0.0;
    for kind in [FceKind::C0, FceKind::C1, FceKind::MixedC1x, FceKind::MixedC1y] {
        let mesh = Mesh2D::new(vec![0.0, 0.4, 1.0, 1.3], vec![-1.0, 0.2, 1.0]).unwrap();
        let field = build_field_2d(mesh.clone(), kind, BasisFamily::Legendre, 5, 5).unwrap();
        for _ in 0..100 {
            let theta: Vec<f64> = (0..field.n_free()).map(|_| rng.random_range(-1.0..1.0)).collect();
            for j in 0..mesh.ny() {
                for i in 1..mesh.nx() {
                    let (a, b) = (mesh.element_index(i - 1, j), mesh.element_index(i, j));
                    for y in interior(rng, mesh.ys[j], mesh.ys[j + 1], 3) {
                        let pt = [mesh.xs[i], y];
                        for k in 0..=kind.continuity(0).unwrap() {
                            let d = field.form(a, pt).component(k, 0).eval(&theta) - field.form(b, pt).component(k, 0).eval(&theta);
                            worst = worst.max(d.abs());
                        }
                    }
                }
            }
            for j in 1..mesh.ny() {
                for i in 0..mesh.nx() {
                    let (a, b) = (mesh.element_index(i, j - 1), mesh.element_index(i, j));
                    for x in interior(rng, mesh.xs[i], mesh.xs[i + 1], 3) {
                        let pt = [x, mesh.ys[j]];
                        for k in 0..=kind.continuity(1).unwrap() {
                            let d = field.form(a, pt).component(0, k).eval(&theta) - field.form(b, pt).component(0, k).eval(&theta);
                            worst = worst.max(d.abs());
                        }
                    }
                }
            }
        }
    }
    worst
}

fn kronecker(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let xs = [rng.random_range(-1.0..-0.3), rng.random_range(-0.2..0.2), rng.random_range(0.3..1.0)];
        let cons: Vec<PointConstraint> = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| PointConstraint { x, op: if i == 1 { PointOp::Derivative } else { PointOp::Value }, target: rng.random_range(-1.0..1.0) })
            .collect();
        let ce = build_constrained_expression(cons.clone(), None).unwrap();
        for (i, c) in cons.iter().enumerate() {
            let d = usize::from(c.op == PointOp::Derivative);
            for (j, s) in ce.switching(c.x).iter().enumerate() {
                worst = worst.max((s[d] - if i == j { 1.0 } else { 0.0 }).abs());
            }
            let (a, w) = (rng.random_range(-2.0..2.0), rng.random_range(0.5..3.0));
            let g = move |x: f64| -> Jet { [a * (w * x).sin(), a * w * (w * x).cos(), -a * w * w * (w * x).sin()] };
            worst = worst.max((ce.apply(&g, c.x)[d] - c.target).abs());
        }
    }
    worst
}

fn wave(a: f64, b: f64, c: f64, d: f64) -> Arc<dyn Fn(f64, f64) -> Jet2 + Send + Sync> {
    Arc::new(move |x, y| {
        let mut j = [[0.0; 3]; 3];
        for (kx, row) in j.iter_mut().enumerate() {
            for (ky, v) in row.iter_mut().enumerate() {
                let fx = a.powi(kx as i32) * (a * x + c + kx as f64 * PI / 2.0).sin();
                let fy = b.powi(ky as i32) * (b * y + d + ky as f64 * PI / 2.0).cos();
                *v = fx * fy;
            }
        }
        j
    })
}

fn lift_reproduction(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let f = wave(rng.random_range(0.5..2.0), rng.random_range(0.5..2.0), rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let rect = Rect::new(-0.5, 0.7, 0.1, 1.2).unwrap();
        let c0 = bivariate_lift_c0(rect, EdgeTraces::of(f.clone(), rect, false)).unwrap();
        let c1 = bivariate_lift_c1(rect, EdgeTraces::of(f.clone(), rect, false), EdgeTraces::of(f.clone(), rect, true)).unwrap();
        for t in interior(rng, 0.0, 1.0, 5) {
            let x = rect.x0 + t * (rect.x1 - rect.x0);
            let y = rect.y0 + t * (rect.y1 - rect.y0);
            for (px, py) in [(rect.x0, y), (rect.x1, y), (x, rect.y0), (x, rect.y1)] {
                let ex = f(px, py);
                worst = worst.max((c0.eval(px, py)[0][0] - ex[0][0]).abs());
                let l1 = c1.eval(px, py);
                worst = worst.max((l1[0][0] - ex[0][0]).abs());
                let n = if px == rect.x0 || px == rect.x1 { (l1[1][0], ex[1][0]) } else { (l1[0][1], ex[0][1]) };
                worst = worst.max((n.0 - n.1).abs());
            }
        }
    }
    worst
}

/// Largest relative mismatch between the analytic Jacobian and central differences.
fn jacobian_fd(id: &str, p: usize, rng: &mut ChaCha8Rng) -> f64 {
    let case = find_case(id).unwrap();
    let s = case.defaults.with(&Overrides { p: Some(p), ..o() });
    let sys = prepare(&case, &s).unwrap().system;
    let n = sys.n_params();
    let theta: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
    let jac = sys.jacobian(&theta).unwrap();
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let mut tp = theta.clone();
        let mut tm = theta.clone();
        tp[j] += h;
        tm[j] -= h;
        let (rp, rm) = (sys.residual(&tp).unwrap(), sys.residual(&tm).unwrap());
        for i in 0..rp.len() {
            let fd = (rp[i] - rm[i]) / (2.0 * h);
            worst = worst.max((fd - jac[(i, j)]).abs() / (1.0 + jac[(i, j)].abs()));
        }
    }
    worst
}

fn ac9() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let c1d = continuity_1d(&mut rng);
    out.check(c1d <= 1e-10, format!("1D continuity jumps over 100 random vectors: {c1d:.2e}"));
    let c2d = continuity_2d(&mut rng);
    out.check(c2d <= 1e-10, format!("2D continuity jumps over 100 random vectors: {c2d:.2e}"));
    let kr = kronecker(&mut rng);
    out.check(kr <= 1e-10, format!("switching Kronecker and constraint satisfaction: {kr:.2e}"));
    let lr = lift_reproduction(&mut rng);
    out.check(lr <= 1e-10, format!("lift trace reproduction: {lr:.2e}"));
    for (id, p) in [("nl-helmholtz1d", 6), ("relbc1d-nonlinear", 6)] {
        let d = jacobian_fd(id, p, &mut rng);
        out.check(d <= 1e-6, format!("{id} Jacobian vs central differences: {d:.2e}"));
    }
    for case in catalog() {
        let r = manufactured_residual(&case, 200);
        out.check(r <= 1e-10, format!("{} manufactured residual {r:.2e}", case.id));
    }
    out
}

fn ac10() -> Outcome {
    let mut out = Outcome::new();
    for n in [2usize, 4] {
        let mut errs = Vec::new();
        for p in [4usize, 6, 8, 10] {
            if let Some(r) = out.run("nl-helmholtz1d", Overrides { nx: Some(n), p: Some(p), ..o() }) {
                errs.push((p, r.linf));
            }
        }
        let last = errs.last().map_or(f64::NAN, |e| e.1);
        out.check(decays(&errs) && last <= 1e-8, format!("N={n} p-decay to {last:.2e} <= 1e-8 [{}]", fmt_errs(&errs)));
    }
    out
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, fn() -> Outcome); 10] = [
        ("AC1", "1D Helmholtz error levels", ac1),
        ("AC2", "IVP error levels", ac2),
        ("AC3", "h-refinement rate p+1", ac3),
        ("AC4", "2D Helmholtz (2,1) error levels and ordering", ac4),
        ("AC5", "2D Helmholtz (8,8)", ac5),
        ("AC6", "space-time advection", ac6),
        ("AC7", "sinusoidal bases", ac7),
        ("AC8", "relative boundary conditions", ac8),
        ("AC9", "property suites", ac9),
        ("AC10", "nonlinear Helmholtz p-decay", ac10),
    ];
    let mut failed = Vec::new();
    for (id, title, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{id:<5} {verdict} {title} ({:.1} s)", start.elapsed().as_secs_f64());
        for note in &outcome.notes {
            println!("        {note}");
        }
        if !outcome.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("failed: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
