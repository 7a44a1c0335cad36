//! The subcommands.

use anyhow::{Context, Result};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::path::Path;

use voatwist::correlation::{
    check_all, check_associativity, check_generating, check_l_minus_one, check_locality, n_point, solve_blocks, BlockDatum, Sample,
};
use voatwist::exponent::Exponent;
use voatwist::fusion::{fusion_table, table_latex, table_row, FusionCache, FusionQuery};
use voatwist::kernels::{f_kernel, f_kernel_expansion, kernel_expansions_agree, kernel_recurrence_defect, kernel_sites, kernel_suite, residue_suite, KernelIndex};
use voatwist::rational::{fmt_q, parse_q, Rational};
use voatwist::report::CheckReport;
use voatwist::series::ExpansionSite;
use voatwist::voa::{GradedVector, ModuleKind, Twist, VoaInstance, VoaKind};
use voatwist::zhu::{graded_surjection_check, quotient_algebra, quotient_bimodule, BimoduleMode, TruncationWindow};

use crate::config::{parse_mode, parse_module, parse_rational, Format, RawSettings, SessionConfig, UsageError};
use crate::latex::{latex_mpf, latex_series};

/// The text emitted by a subcommand and whether its checks passed.
pub struct Output {
    /// Rendered report.
    pub body: String,
    /// False when a check failed.
    pub passed: bool,
}

impl Output {
    fn json(v: &Value, passed: bool) -> Self {
        Output { body: format!("{}\n", serde_json::to_string_pretty(v).expect("JSON values always serialize")), passed }
    }
}

/// Which property check `corr` runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum CheckKind {
    /// Four-point locality and five-point route equality.
    Locality,
    /// Associativity residues.
    Assoc,
    /// `L(-1)`-derivative identities.
    #[value(name = "l-1")]
    LMinusOne,
    /// Generating properties.
    Generating,
    /// Every property check.
    All,
}

impl CheckKind {
    fn name(self) -> &'static str {
        match self {
            CheckKind::Locality => "locality",
            CheckKind::Assoc => "assoc",
            CheckKind::LMinusOne => "l-1",
            CheckKind::Generating => "generating",
            CheckKind::All => "all",
        }
    }
}

fn no_latex(cfg: &SessionConfig) -> Result<Format> {
    match cfg.format_or(Format::Json) {
        Format::Latex => Err(UsageError::new("--format", "latex output is available for kernels and fusion --table only").into()),
        f => Ok(f),
    }
}

fn summary(check: &str, parts: &[CheckReport]) -> CheckReport {
    let mut total = CheckReport::new(check);
    for p in parts {
        total.absorb(p);
    }
    total
}

fn report_output(total: &CheckReport, parts: &[CheckReport], extra: Value, format: Format) -> Output {
    let passed = total.passed() && parts.iter().all(CheckReport::passed);
    match format {
        Format::Text => {
            let mut s = String::new();
            for p in parts {
                s.push_str(&format!("{} cases={} failures={}\n", p.check, p.cases, p.failures));
            }
            s.push_str(&format!("{} cases={} failures={}\n", total.check, total.cases, total.failures));
            Output { body: s, passed }
        }
        _ => {
            let mut v = json!({"check": total.check, "cases": total.cases, "failures": total.failures, "parts": parts});
            if let (Some(obj), Value::Object(more)) = (v.as_object_mut(), extra) {
                obj.extend(more);
            }
            Output::json(&v, passed)
        }
    }
}

fn site_name(site: &ExpansionSite) -> &'static str {
    match site {
        ExpansionSite::AtZero(_) => "zero",
        ExpansionSite::AtInfinity(_) => "infinity",
        ExpansionSite::AtDiagonal(..) => "diagonal",
    }
}

/// `kernels`: `F_{n,i}` with its three expansions.
pub fn kernels(cfg: &SessionConfig, n: &str, i: u32) -> Result<Output> {
    let order = if cfg.twist == Twist::Theta { 2 } else { 1 };
    let n: Exponent = n.parse().map_err(|_| UsageError::new("--n", format!("`{n}` is not a rational number")))?;
    if !n.in_lattice(order) {
        return Err(UsageError::new("--n", format!("{n} is not a multiple of 1/{order}")).into());
    }
    let depth = cfg.trunc_or(12).to_int().ok_or_else(|| UsageError::new("--trunc", "kernels expects a whole number of terms"))?;
    let idx = KernelIndex::new(n, i);
    let f = f_kernel(idx);
    let recurrence = kernel_recurrence_defect(n, i).is_zero();
    let agree = kernel_expansions_agree(idx, depth)?;
    let mut expansions = Vec::new();
    for (site, trunc) in kernel_sites(idx, depth) {
        expansions.push((site_name(&site), f_kernel_expansion(idx, &site, trunc)?));
    }
    let passed = recurrence && agree;
    Ok(match cfg.format_or(Format::Json) {
        Format::Json => Output::json(
            &json!({
                "n": n.to_string(),
                "i": i,
                "T": order,
                "denominator": cfg.denominator,
                "terms": depth,
                "function": f.to_json(),
                "expansions": expansions.iter().map(|(s, e)| json!({"site": s, "series": e.to_json()})).collect::<Vec<_>>(),
                "recurrence": recurrence,
                "expansions_agree": agree,
            }),
            passed,
        ),
        Format::Latex => {
            let mut s = format!("\\[ F_{{{n},{i}}}(z, w) = {} \\]\n", latex_mpf(&f));
            for (site, e) in &expansions {
                s.push_str(&format!("\\[ \\iota_{{\\mathrm{{{site}}}}} F_{{{n},{i}}} = {} + \\cdots \\]\n", latex_series(e)));
            }
            Output { body: s, passed }
        }
        Format::Text => {
            let mut s = format!("F_{{{n},{i}}} = {f}\n");
            for (site, e) in &expansions {
                let terms: Vec<String> = e.terms().map(|(k, c)| format!("({c}) ({})^({k})", e.var())).collect();
                s.push_str(&format!("{site}: {}\n", terms.join(" + ")));
            }
            s.push_str(&format!("recurrence={recurrence} expansions_agree={agree}\n"));
            Output { body: s, passed }
        }
    })
}

/// `zhu`: the quotient algebra.
pub fn zhu(cfg: &SessionConfig) -> Result<Output> {
    let format = no_latex(cfg)?;
    let voa = cfg.instance();
    let alg = quotient_algebra(&voa, &TruncationWindow::new(cfg.trunc_or(4)))?;
    let passed = alg.is_associative_unital();
    Ok(match format {
        Format::Text => {
            let form = voa.form();
            let basis: Vec<String> = alg.basis().iter().map(|m| m.render(form)).collect();
            Output { body: format!("dim {}\nbasis {}\nassociative {}\n", alg.dim(), basis.join(", "), passed), passed }
        }
        _ => Output::json(&alg.to_json(), passed),
    })
}

fn default_m1(voa: &VoaInstance) -> &'static str {
    match voa.kind() {
        VoaKind::Heisenberg => "M(1,1/2)",
        VoaKind::LatticeA1 => "V{L+a/2}",
    }
}

fn default_m3(voa: &VoaInstance) -> &'static str {
    match voa.kind() {
        VoaKind::Heisenberg => "T+",
        VoaKind::LatticeA1 => "T-",
    }
}

/// `bimodule`: `A_g(M)` or `B_{g,lambda}(M)` with its action matrices.
pub fn bimodule(cfg: &SessionConfig, module: Option<&String>, mode: Option<&String>) -> Result<Output> {
    let format = no_latex(cfg)?;
    let voa = cfg.instance();
    let m = parse_module(&voa, &cfg.entry("module", module, default_m1(&voa)), "--module")?;
    let mode = parse_mode(&cfg.entry("mode", mode, "Ag"))?;
    let window = TruncationWindow::new(cfg.trunc_or(4));
    let alg = quotient_algebra(&voa, &window)?;
    let b = quotient_bimodule(&m, &alg, &mode, &window)?;
    let passed = b.actions_commute();
    Ok(match format {
        Format::Text => {
            let basis: Vec<String> = b.basis().iter().map(|x| x.render(voa.form())).collect();
            Output { body: format!("module {}\ndim {}\nbasis {}\nactions_commute {}\n", m.name(), b.dim(), basis.join(", "), passed), passed }
        }
        _ => {
            let mut v = b.to_json(&alg);
            if let (Some(obj), BimoduleMode::Bg(l)) = (v.as_object_mut(), &mode) {
                obj.insert("lambda".into(), json!(fmt_q(l)));
            }
            Output::json(&v, passed)
        }
    })
}

fn datum(cfg: &SessionConfig, m: [Option<&String>; 3], default_trunc: i64) -> Result<BlockDatum> {
    let voa = cfg.instance();
    if voa.twist() == Twist::Identity {
        return Err(UsageError::new("--twist", "conformal blocks need the theta twist").into());
    }
    let m1 = parse_module(&voa, &cfg.entry("m1", m[0], default_m1(&voa)), "--m1")?;
    let m2 = parse_module(&voa, &cfg.entry("m2", m[1], "T+"), "--m2")?;
    let m3 = parse_module(&voa, &cfg.entry("m3", m[2], default_m3(&voa)), "--m3")?;
    if m1.is_twisted() {
        return Err(UsageError::new("--m1", "M1 must be an untwisted module").into());
    }
    for (flag, x) in [("--m2", &m2), ("--m3", &m3)] {
        if !x.is_twisted() {
            return Err(UsageError::new(flag, "M2 and M3 must be twisted modules").into());
        }
    }
    Ok(BlockDatum::new(m1, m2, m3, TruncationWindow::new(cfg.trunc_or(default_trunc)))?)
}

/// Options of the `corr` subcommand.
pub struct CorrArgs<'a> {
    /// The check to run.
    pub check: Option<CheckKind>,
    /// `n-point` when a correlation function is to be emitted.
    pub emit: Option<&'a str>,
    /// Input file of `--emit`.
    pub inputs: Option<&'a Path>,
    /// Module flags.
    pub modules: [Option<&'a String>; 3],
}

/// `corr`: property checks on the solved blocks, or one correlation function.
pub fn corr(cfg: &SessionConfig, args: CorrArgs<'_>) -> Result<Output> {
    let format = no_latex(cfg)?;
    if let Some(kind) = args.emit {
        if kind != "n-point" {
            return Err(UsageError::new("--emit", format!("`{kind}` is not n-point")).into());
        }
        let path = args.inputs.ok_or_else(|| UsageError::new("--inputs", "--emit n-point needs an input file"))?;
        return emit_n_point(cfg, args.modules, path, format);
    }
    let check = args.check.unwrap_or(CheckKind::All);
    let d = datum(cfg, args.modules, 5)?;
    let space = solve_blocks(&d)?;
    let sample = Sample::standard(&d, Exponent::int(1));
    let mut parts: Vec<CheckReport> = Vec::new();
    for block in space.blocks() {
        let reports = match check {
            CheckKind::Locality => vec![check_locality(&block, &sample)?],
            CheckKind::Assoc => vec![check_associativity(&block, &sample, &[-2, -1, 0, 1, 2, 3])?],
            CheckKind::LMinusOne => vec![check_l_minus_one(&block, &sample)?],
            CheckKind::Generating => vec![check_generating(&block, &sample, Exponent::int(1))?],
            CheckKind::All => check_all(&block, &sample)?,
        };
        for r in reports {
            match parts.iter_mut().find(|p| p.check == r.check) {
                Some(p) => p.absorb(&r),
                None => parts.push(r),
            }
        }
    }
    let total = summary(check.name(), &parts);
    let extra = json!({
        "datum": {"m1": d.m1().name(), "m2": d.m2().name(), "m3": d.m3().name(), "trunc": d.window().max_degree.to_string()},
        "blocks": space.dim(),
    });
    Ok(report_output(&total, &parts, extra, format))
}

fn rationals(v: Option<&Value>, flag: &str) -> Result<Option<Vec<Rational>>, UsageError> {
    let Some(v) = v else { return Ok(None) };
    let arr = v.as_array().ok_or_else(|| UsageError::new(flag, "expected a list of rationals"))?;
    arr.iter()
        .map(|x| x.as_str().and_then(|s| parse_q(s).ok()).ok_or_else(|| UsageError::new(flag, format!("`{x}` is not a rational string"))))
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn emit_n_point(cfg: &SessionConfig, modules: [Option<&String>; 3], path: &Path, format: Format) -> Result<Output> {
    let text = std::fs::read_to_string(path).map_err(|e| UsageError::new("--inputs", format!("{}: {e}", path.display())))?;
    let input: Value = serde_json::from_str(&text).map_err(|e| UsageError::new("--inputs", e.to_string()))?;
    let d = datum(cfg, modules, 5)?;
    let form = d.voa().form();
    let bad = |key: &str, msg: String| UsageError::new("--inputs", format!("{key}: {msg}"));
    let states: Vec<GradedVector> = input
        .get("states")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("states", "missing list".into()))?
        .iter()
        .map(|s| GradedVector::from_json(s, form).map_err(|e| bad("states", e.to_string())))
        .collect::<Result<_, _>>()?;
    let v = GradedVector::from_json(input.get("vector").ok_or_else(|| bad("vector", "missing".into()))?, form).map_err(|e| bad("vector", e.to_string()))?;
    let unit = |n: usize| {
        let mut u = vec![Rational::from_integer(0.into()); n];
        u[0] = Rational::from_integer(1.into());
        u
    };
    let u3 = rationals(input.get("u3"), "--inputs")?.unwrap_or_else(|| unit(d.u3_basis().len()));
    let u2 = rationals(input.get("u2"), "--inputs")?.unwrap_or_else(|| unit(d.u2_basis().len()));
    if u3.len() != d.u3_basis().len() || u2.len() != d.u2_basis().len() {
        return Err(bad("u2/u3", "length differs from the bottom level".into()).into());
    }
    let order: Vec<usize> = match input.get("order") {
        None => (0..states.len()).rev().collect(),
        Some(o) => o
            .as_array()
            .and_then(|a| a.iter().map(|x| x.as_u64().map(|k| k as usize)).collect::<Option<Vec<_>>>())
            .ok_or_else(|| bad("order", "expected a list of indices".into()))?,
    };
    let mut sorted = order.clone();
    sorted.sort_unstable();
    if sorted != (0..states.len()).collect::<Vec<_>>() {
        return Err(bad("order", "not a permutation of the insertions".into()).into());
    }
    let k = input.get("block").and_then(Value::as_u64).unwrap_or(0) as usize;
    let space = solve_blocks(&d)?;
    let blocks = space.blocks();
    let block = blocks.get(k).ok_or_else(|| bad("block", format!("the datum has {} blocks", blocks.len())))?;
    let f = n_point(block, &u3, &states, &v, &u2, &order)?;
    Ok(match format {
        Format::Text => Output { body: format!("{f}\n"), passed: true },
        _ => Output::json(&f.to_json(), true),
    })
}

/// `fusion`: one fusion rule by both routes, or the whole table.
pub fn fusion(cfg: &SessionConfig, table: bool, modules: [Option<&String>; 3]) -> Result<Output> {
    let window = TruncationWindow::new(cfg.trunc_or(4));
    if table {
        let rows = fusion_table(&window)?;
        let passed = rows.iter().all(|r| r.tensor.dimension == r.blocks);
        return Ok(match cfg.format_or(Format::Latex) {
            Format::Latex => Output { body: table_latex(&rows), passed },
            Format::Json => Output::json(&Value::Array(rows.iter().map(|r| r.to_json()).collect()), passed),
            Format::Text => {
                let body = rows
                    .iter()
                    .map(|r| format!("{}; {} -> {}: tensor={} blocks={} stable={}\n", r.m1, r.m2, r.m3, r.tensor.dimension, r.blocks, r.tensor.stable))
                    .collect();
                Output { body, passed }
            }
        });
    }
    let format = no_latex(cfg)?;
    let d = datum(cfg, modules, 4)?;
    let q = FusionQuery::new(d.m1().clone(), d.m2().clone(), d.m3().clone());
    let row = table_row(&FusionCache::new(), &q, &window)?;
    let passed = row.tensor.dimension == row.blocks;
    Ok(match format {
        Format::Text => Output {
            body: format!("{}; {} -> {}: dimension={} stable={} tensor={} blocks={}\n", row.m1, row.m2, row.m3, row.tensor.dimension, row.tensor.stable, row.tensor.dimension, row.blocks),
            passed,
        },
        _ => {
            let mut v = row.to_json();
            if let Some(obj) = v.as_object_mut() {
                obj.insert("assumption".into(), json!("M2 and the contragredient of M3 are generalized Verma modules"));
            }
            Output::json(&v, passed)
        }
    })
}

fn expect(check: &str, ok: bool) -> CheckReport {
    let mut r = CheckReport::new(check);
    r.record(ok);
    r
}

/// `selftest`: quick versions of every invariant suite.
pub fn selftest(cfg: &SessionConfig) -> Result<Output> {
    let format = no_latex(cfg)?;
    let mut parts = kernel_suite(2, Exponent::int(2), 4, 12)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    parts.push(residue_suite(&mut rng, 2, 50, Exponent::int(10))?);

    let h = VoaInstance::heisenberg_rank_one(Twist::Theta);
    let l = VoaInstance::lattice_a1(Twist::Theta);
    let mut jac = h.jacobi_sweep(&h.module(ModuleKind::Twisted { sign: 1 }), Exponent::int(2), 2, Exponent::int(2))?;
    jac.absorb(&l.jacobi_sweep(&l.module(ModuleKind::Twisted { sign: 1 }), Exponent::int(1), 1, Exponent::int(1))?);
    parts.push(jac);

    let window = TruncationWindow::new(Exponent::int(3));
    let ha = quotient_algebra(&h, &window)?;
    let la = quotient_algebra(&l, &window)?;
    parts.push(expect("zhu", ha.dim() == 1 && la.dim() == 2 && ha.is_associative_unital() && la.is_associative_unital()));
    let mut surj = CheckReport::new("surjection");
    for voa in [&h, &l] {
        surj.record(graded_surjection_check(voa, &window)?.holds);
    }
    parts.push(surj);

    let rows = fusion_table(&window)?;
    let expected = [1usize, 1, 0, 0, 1, 0, 1, 1, 0];
    let mut fus = CheckReport::new("fusion");
    for (r, e) in rows.iter().zip(expected) {
        fus.record(r.tensor.dimension == e && r.blocks == e);
    }
    parts.push(fus);

    let hd = BlockDatum::new(h.module(ModuleKind::Charged(vec![parse_rational("1/2", "selftest")?])), h.module(ModuleKind::Twisted { sign: 1 }), h.module(ModuleKind::Twisted { sign: 1 }), TruncationWindow::new(Exponent::int(5)))?;
    let sample = Sample::standard(&hd, Exponent::int(1));
    let mut props = CheckReport::new("properties");
    for block in solve_blocks(&hd)?.blocks() {
        for r in check_all(&block, &sample)? {
            props.absorb(&r);
        }
    }
    parts.push(props);

    let total = summary("selftest", &parts);
    Ok(report_output(&total, &parts, json!({}), format))
}

/// Writes the report to `--out` or standard output.
pub fn emit(cfg: &SessionConfig, out: &Output) -> Result<()> {
    match &cfg.out {
        Some(p) => std::fs::write(p, &out.body).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{}", out.body);
            Ok(())
        }
    }
}

/// Reads `--config` (or `--datum`) files.
pub fn read_settings(path: Option<&Path>, flag: &str) -> Result<RawSettings, UsageError> {
    match path {
        Some(p) => RawSettings::read(p, flag),
        None => Ok(RawSettings::default()),
    }
}
