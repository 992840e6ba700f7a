use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use zerorect_core::constructions::{
    default_verify_budget, gen_c1, gen_c2, gen_c3, gen_c4, gen_pbiased, verify_construction, ConstructionSpec,
    PBiased,
};
use zerorect_core::disclab::{
    disc_lower_witness, gamma2_witness, half_average_deviation_check, halve_reduce_average, two_cases_step,
    variance_floor, HalfMode, StepConfig, StepRule, VarianceFloorMode,
};
use zerorect_core::extract::{
    clean_disjointness_graph, covering_probability_mc, drc_witness_search, random_union_extract, DrcConfig,
    ExtractionParams,
};
use zerorect_core::famcore::build_graph;
use zerorect_core::matcore::{format_rational, parse_csv, parse_rational, rational_to_f64, write_csv, DenseMatrix, EntryMode};
use zerorect_core::oracles::{
    certify_constant, certify_cross_disjoint, covering_lower_bound, covering_probability_exact, cut_norm_exact,
    disc_exact, max_constant_rectangle, max_constant_square, max_cross_disjoint_biclique, OracleBudget,
};
use zerorect_core::spectral::{bias, entropy_grid_scan, even_odd_check, intersection_distribution, parseval_check};
use zerorect_core::zerorect::{find_constant_submatrix_int, find_zero_submatrix, PipelineConfig};
use zerorect_core::{Distribution, Error, SetFamily};

use crate::args::*;
use crate::error::{CliError, EXIT_OK, EXIT_VERIFICATION};
use crate::report::{render, write_output, RunConfig};

/// Memory cap for table-based oracle routes, in MiB.
pub const BUDGET_ENV: &str = "ZERORECT_BUDGET_MB";

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn read_family(path: &Path) -> Result<SetFamily, CliError> {
    Ok(SetFamily::from_json(&read(path)?)?)
}

fn read_pair(input: &PairInput) -> Result<(SetFamily, SetFamily), CliError> {
    let a = read_family(&input.a)?;
    let b = match &input.b {
        Some(p) => read_family(p)?,
        None => a.clone(),
    };
    Ok((a, b))
}

fn read_matrix(path: &Path, exact: bool) -> Result<DenseMatrix, CliError> {
    let mode = if exact { EntryMode::Rational } else { EntryMode::Float };
    Ok(parse_csv(&read(path)?, mode)?)
}

fn required<T: Clone>(v: &Option<T>, flag: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::Input(format!("--{flag} is required here")))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

fn default_budget(cmd: &Command) -> OracleBudget {
    match cmd {
        Command::Verify(_) => default_verify_budget(),
        Command::Zerorect(_) => PipelineConfig::default().oracle_budget,
        Command::Disclab(_) => OracleBudget::branch_and_bound(),
        // The rectangle searches prune well; the cut-norm and biclique ones do not.
        Command::Oracle(a) if matches!(a.op, OracleOp::ConstantSquare | OracleOp::ConstantRectangle) => {
            default_verify_budget()
        }
        _ => OracleBudget::default(),
    }
}

/// Defaults, then flags, then the environment, then the config file.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let g = &cli.global;
    let mut budget = default_budget(&cli.command);
    if let Some(x) = g.budget_rows {
        budget.max_rows = x;
    }
    if let Some(x) = g.budget_cols {
        budget.max_cols = x;
    }
    if let Some(x) = g.budget_family {
        budget.max_family = x;
    }
    if let Some(x) = g.budget_universe {
        budget.max_universe = x;
    }
    if let Ok(mb) = std::env::var(BUDGET_ENV) {
        let mb: u64 = mb
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("{BUDGET_ENV} must be a whole number of MiB")))?;
        budget.max_memory_bytes = Some(mb << 20);
    }
    let cfg = RunConfig {
        seed: g.seed,
        constants: g.constants.into(),
        budget,
        jobs: g.jobs,
    };
    match &g.config {
        None => Ok(cfg),
        Some(path) => {
            let file: Value =
                serde_json::from_str(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            cfg.overridden_by(file)
        }
    }
}

/// A command's result and whether its output passed its own check.
struct Outcome {
    verified: bool,
    result: Value,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome { verified: true, result }
    }
}

pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let cfg = resolve_config(cli)?;
    let (name, outcome) = match &cli.command {
        Command::Gen(a) => {
            write_output(cli.global.out.as_deref(), &generate(a)?)?;
            return Ok(EXIT_OK);
        }
        Command::Extract(a) => ("extract", extract(a, &cfg)?),
        Command::Cover(a) => ("cover", cover(a, &cfg)?),
        Command::Spectral(a) => ("spectral", spectral(a)?),
        Command::Disclab(a) => ("disclab", disclab(a, &cfg)?),
        Command::Zerorect(a) => ("zerorect", zerorect(a, &cfg)?),
        Command::Verify(a) => ("verify", verify(a, &cfg)?),
        Command::Oracle(a) => ("oracle", oracle(a, &cfg)?),
    };
    let text = render(name, &cfg, !cli.global.no_timestamp, outcome.verified, outcome.result);
    write_output(cli.global.out.as_deref(), &text)?;
    Ok(if outcome.verified { EXIT_OK } else { EXIT_VERIFICATION })
}

fn extract(a: &ExtractArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (fa, fb) = read_pair(&a.input)?;
    match a.method {
        ExtractMethod::RandomUnion => {
            let params = ExtractionParams {
                delta: a.delta,
                trials: a.trials,
                seed: cfg.seed,
                k_override: a.k,
                ..ExtractionParams::default()
            };
            let ex = random_union_extract(&fa, &fb, &params)?;
            let verified = certify_cross_disjoint(&fa, &fb, &ex.left, &ex.right);
            let one_based = |v: &[usize]| v.iter().map(|i| i + 1).collect::<Vec<_>>();
            Ok(Outcome {
                verified,
                result: json!({
                    "method": "random-union",
                    "R": one_based(&ex.left),
                    "S": one_based(&ex.right),
                    "k": ex.k,
                    "trials": ex.trials,
                    "bestProduct": ex.best_product.to_string(),
                    "bestTrial": ex.best_trial,
                    "measuredDensity": ex.measured_density,
                    "usedStarFallback": ex.used_star_fallback,
                    "trace": to_value(&ex.trace),
                }),
            })
        }
        ExtractMethod::Drc => {
            let out = drc_witness_search(&fa, &fb, a.theta, cfg.seed, &DrcConfig::default())?;
            Ok(Outcome::ok(json!({ "method": "drc", "outcome": to_value(&out) })))
        }
        ExtractMethod::Clean => {
            let g = build_graph(&fa, &fb)?;
            let sides = clean_disjointness_graph(&g, a.theta)?;
            Ok(Outcome::ok(json!({ "method": "clean", "cleaned": to_value(&sides) })))
        }
    }
}

fn cover(a: &CoverArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mu = match a.dist {
        DistKind::Pbiased => {
            let p = parse_rational(&required(&a.p, "p")?)?;
            match gen_pbiased(required(&a.n, "n")?, &p)? {
                PBiased::Explicit(d) => d,
                PBiased::Sampler(_) => {
                    return Err(CliError::Core(Error::BudgetExceeded {
                        what: "explicit product measure",
                        needed: a.n.unwrap_or(0) as u128,
                        limit: zerorect_core::distribution::MAX_EXPLICIT_UNIVERSE as u128,
                    }))
                }
            }
        }
        DistKind::Uniform => Distribution::product(required(&a.n, "n")?, &parse_rational("1/2")?)?,
        DistKind::Family => Distribution::uniform_on(&read_family(&required(&a.family, "family")?)?)?,
    };
    let n = mu.universe();
    let bound = covering_lower_bound(n, a.r);
    if a.exact {
        let p = covering_probability_exact(&mu, a.r, &cfg.budget)?;
        let pf = rational_to_f64(&p);
        Ok(Outcome::ok(json!({
            "n": n,
            "r": a.r,
            "exact": true,
            "probability": format_rational(&p),
            "probabilityFloat": pf,
            "lowerBound": bound,
            "meetsBound": pf >= bound,
        })))
    } else {
        let est = covering_probability_mc(&mu, a.r, a.trials, cfg.seed)?;
        Ok(Outcome::ok(json!({
            "n": n,
            "r": a.r,
            "exact": false,
            "estimate": to_value(&est),
            "lowerBound": bound,
        })))
    }
}

fn spectral(a: &SpectralArgs) -> Result<Outcome, CliError> {
    let pair = || -> Result<(SetFamily, SetFamily), CliError> {
        read_pair(&PairInput {
            a: required(&a.a, "a")?,
            b: a.b.clone(),
        })
    };
    match a.mode {
        SpectralMode::EntropyScan => {
            let scan = entropy_grid_scan(a.steps, a.k_max, a.ln_c)?;
            Ok(Outcome {
                verified: scan.holds(),
                result: json!({ "mode": "entropy-scan", "scan": to_value(&scan) }),
            })
        }
        SpectralMode::Bias => {
            let (fa, fb) = pair()?;
            let b = bias(&fa, &fb, a.prime, a.j)?;
            Ok(Outcome::ok(json!({ "mode": "bias", "prime": a.prime, "j": a.j, "bias": b })))
        }
        SpectralMode::EvenOdd => {
            let (fa, fb) = pair()?;
            let c = even_odd_check(&fa, &fb)?;
            Ok(Outcome {
                verified: c.holds,
                result: json!({ "mode": "even-odd", "check": to_value(&c) }),
            })
        }
        SpectralMode::Parseval => {
            let (fa, fb) = pair()?;
            let d = intersection_distribution(&fa, &fb, a.prime)?;
            let c = parseval_check(&d);
            Ok(Outcome {
                verified: c.holds,
                result: json!({ "mode": "parseval", "distribution": to_value(&d), "check": to_value(&c) }),
            })
        }
    }
}

fn disclab(a: &DisclabArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let m = read_matrix(&a.input.matrix, a.input.exact)?;
    let constants = cfg.constant_set();
    let result = match a.op {
        DisclabOp::Witness => {
            let g = gamma2_witness(&m)?;
            let d = disc_lower_witness(&m, &constants)?;
            let exact = match disc_exact(&m, &cfg.budget) {
                Ok(x) => to_value(&x),
                Err(e @ Error::BudgetExceeded { .. }) => json!({ "skipped": e.to_string() }),
                Err(e) => return Err(e.into()),
            };
            json!({ "op": "witness", "gamma2": to_value(&g), "discLower": to_value(&d), "discExact": exact })
        }
        DisclabOp::Half => {
            let h = halve_reduce_average(&m, None, HalfMode::Auto, &cfg.budget, cfg.seed)?;
            json!({ "op": "half", "reduction": to_value(&h) })
        }
        DisclabOp::Step => {
            let rule = match a.rule {
                RuleArg::SqrtPOverR => StepRule::SqrtPOverR,
                RuleArg::PTimesOneMinusP => StepRule::PTimesOneMinusP,
                RuleArg::OneOverR => StepRule::OneOverR,
            };
            let sc = StepConfig {
                rank: a.rank,
                seed: cfg.seed,
                ..StepConfig::new(constants, rule)
            };
            let o = two_cases_step(&m, &sc)?;
            let certified = o.certificate_holds(sc.alpha());
            return Ok(Outcome {
                verified: certified || !constants_are_strict(cfg),
                result: json!({ "op": "step", "certified": certified, "outcome": to_value(&o) }),
            });
        }
        DisclabOp::Variance => {
            let modes = [
                ("separatedLowMean", VarianceFloorMode::SeparatedLowMean),
                ("separated", VarianceFloorMode::Separated),
                ("integerNoHalfConstant", VarianceFloorMode::IntegerNoHalfConstant),
            ];
            let mut floors = serde_json::Map::new();
            let mut all_hold = true;
            for (name, mode) in modes {
                let v = match variance_floor(&m, mode, &cfg.budget) {
                    Ok(f) => {
                        all_hold &= f.holds;
                        to_value(&f)
                    }
                    Err(e) => json!({ "notApplicable": e.to_string() }),
                };
                floors.insert(name.into(), v);
            }
            return Ok(Outcome {
                verified: all_hold,
                result: json!({ "op": "variance", "floors": floors }),
            });
        }
        DisclabOp::Deviation => {
            let d = half_average_deviation_check(&m, &cfg.budget)?;
            return Ok(Outcome {
                verified: d.holds,
                result: json!({ "op": "deviation", "check": to_value(&d) }),
            });
        }
    };
    Ok(Outcome::ok(result))
}

fn constants_are_strict(cfg: &RunConfig) -> bool {
    cfg.constant_set().tag == zerorect_core::disclab::ConstantTag::Proven
}

fn zerorect(a: &ZerorectArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let m = read_matrix(&a.input.matrix, a.input.exact)?;
    let mut pc = PipelineConfig::with_constants(cfg.constant_set());
    pc.rank = a.rank;
    if let Some(s) = a.max_steps {
        pc.max_steps = s;
    }
    pc.level_bound = a.level_bound;
    pc.extend = !a.no_extend;
    pc.seed = cfg.seed;
    pc.oracle_budget = cfg.budget;
    let result = match a.mode {
        PipelineMode::Zero => {
            let r = find_zero_submatrix(&m, &pc)?;
            json!({
                "mode": "zero",
                "selection": to_value(&r.selection),
                "size": r.side,
                "value": "0",
                "trace": to_value(&r.trace),
                "pipeline": to_value(&pc),
            })
        }
        PipelineMode::Constant => {
            let r = find_constant_submatrix_int(&m, &pc)?;
            json!({
                "mode": "constant",
                "selection": to_value(&r.selection),
                "size": r.side,
                "value": format_rational(&r.value),
                "trace": to_value(&r.trace),
                "pipeline": to_value(&pc),
            })
        }
    };
    // Both pipelines re-check their block against the input before returning.
    Ok(Outcome::ok(result))
}

fn spec_of(a: &ConstructionArgs) -> Result<ConstructionSpec, CliError> {
    Ok(match a.construction {
        ConstructionId::C1 => ConstructionSpec::C1 {
            n: required(&a.n, "n")?,
            d: required(&a.d, "d")?,
        },
        ConstructionId::C2 => ConstructionSpec::C2 {
            r: required(&a.r, "r")?,
            k: required(&a.k, "k")?,
        },
        ConstructionId::C3 => ConstructionSpec::C3 { r: required(&a.r, "r")? },
        ConstructionId::C4 => ConstructionSpec::C4 {
            r: required(&a.r, "r")?,
            k: required(&a.k, "k")?,
        },
        ConstructionId::Pbiased => ConstructionSpec::PBiased {
            n: required(&a.n, "n")?,
            p: parse_rational(&required(&a.p, "p")?)?,
            r: a.r.unwrap_or(2),
        },
    })
}

fn generate(a: &ConstructionArgs) -> Result<String, CliError> {
    let spec = spec_of(a)?;
    spec.validate()?;
    Ok(match spec {
        ConstructionSpec::C1 { n, d } => {
            let (fa, fb) = gen_c1(n, d)?;
            let parse = |s: String| serde_json::from_str::<Value>(&s).expect("family json");
            format!("{}\n", json!({ "a": parse(fa.to_json()), "b": parse(fb.to_json()) }))
        }
        ConstructionSpec::C2 { r, k } => {
            let (fam, m) = gen_c2(r, k)?;
            if a.family {
                format!("{}\n", fam.to_json())
            } else {
                write_csv(&m)
            }
        }
        ConstructionSpec::C3 { r } => write_csv(&gen_c3(r)?),
        ConstructionSpec::C4 { r, k } => write_csv(&gen_c4(r, k)?),
        ConstructionSpec::PBiased { n, ref p, .. } => match gen_pbiased(n, p)? {
            PBiased::Explicit(d) => {
                let atoms: Vec<Value> = d
                    .atoms()
                    .iter()
                    .map(|(s, w)| json!({ "set": s.to_one_based(), "weight": format_rational(w) }))
                    .collect();
                format!("{}\n", json!({ "n": n, "atoms": atoms }))
            }
            PBiased::Sampler(_) => {
                return Err(CliError::Input(format!("n = {n} is too large to list the support")));
            }
        },
    })
}

fn verify(a: &ConstructionArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rep = verify_construction(&spec_of(a)?, &cfg.budget)?;
    Ok(Outcome {
        verified: rep.passed,
        result: json!({ "report": to_value(&rep) }),
    })
}

fn oracle(a: &OracleArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let matrix = || -> Result<DenseMatrix, CliError> { read_matrix(&required(&a.matrix, "matrix")?, a.exact) };
    let value = a.value.as_deref().map(parse_rational).transpose()?;
    Ok(match a.op {
        OracleOp::CutNorm => Outcome::ok(json!({ "op": "cut-norm", "result": to_value(&cut_norm_exact(&matrix()?, &cfg.budget)?) })),
        OracleOp::Disc => Outcome::ok(json!({ "op": "disc", "result": to_value(&disc_exact(&matrix()?, &cfg.budget)?) })),
        OracleOp::ConstantSquare | OracleOp::ConstantRectangle => {
            let m = matrix()?;
            let (name, block) = if a.op == OracleOp::ConstantSquare {
                ("constant-square", max_constant_square(&m, value.as_ref(), &cfg.budget)?)
            } else {
                ("constant-rectangle", max_constant_rectangle(&m, value.as_ref(), &cfg.budget)?)
            };
            let verified = block.as_ref().is_none_or(|b| certify_constant(&m, &b.selection, &b.value));
            Outcome {
                verified,
                result: json!({ "op": name, "result": to_value(&block) }),
            }
        }
        OracleOp::Biclique => {
            let (fa, fb) = read_pair(&PairInput {
                a: required(&a.a, "a")?,
                b: a.b.clone(),
            })?;
            let res = max_cross_disjoint_biclique(&fa, &fb, &cfg.budget)?;
            Outcome {
                verified: certify_cross_disjoint(&fa, &fb, &res.left, &res.right),
                result: json!({ "op": "biclique", "result": to_value(&res) }),
            }
        }
    })
}
