//! Subcommand definitions and their execution.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use homstar::algebroid::{AForm, AlgebroidPresentation};
use homstar::classes::{characteristic_class, decide_equivalence, Equivalence};
use homstar::formats::{
    parse_constraint, parse_form, parse_presentation, parse_star, parse_star_verified, presentation_hash, render_star,
    render_witness,
};
use homstar::gutt::{gutt_as_series, gutt_associativity_failure, TwistedUea};
use homstar::reduction::{
    coisotropic_check, make_projectable, projectability_check, pullback_class, qr_diagram_check, reduce_star,
    solve_representation, verify_reduction, verify_representation, ConstraintData, ConstraintPresentation,
    RepresentOutcome, Submanifold,
};
use homstar::star::{build_star, moyal_star, verify_equivalence, MoyalVariant, StarSeries};
use homstar::{Error, HbarPoly, Poly};
use serde_json::{json, Value};

use crate::report::{self, Report, Verdict};
use crate::selftest;

#[derive(Parser, Debug)]
#[command(name = "homstar", version, about = "Exact homogeneous star products on duals of Lie algebroids")]
pub struct Cli {
    /// Report format on stdout.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Order {
    /// Truncation order in h.
    #[arg(short = 'K', long = "order", env = "HOMSTAR_K", default_value_t = 3,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
}

#[derive(Args, Debug, Clone)]
pub struct Cap {
    /// Base-degree cap for cohomology computations over a positive-dimensional base.
    #[arg(long = "xdeg-cap")]
    pub cap: Option<u32>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the Lie algebroid axioms of a presentation.
    Validate { presentation: String },
    /// Basis of H^p of the Chevalley–Eilenberg complex.
    Cohomology {
        presentation: String,
        #[arg(short = 'p')]
        degree: usize,
        #[command(flatten)]
        cap: Cap,
    },
    /// Construct the homogeneous star product with twist B.
    BuildStar {
        presentation: String,
        #[arg(long = "B")]
        b: Option<PathBuf>,
        #[command(flatten)]
        order: Order,
        #[arg(short = 'o')]
        output: PathBuf,
    },
    /// Re-check associativity and homogeneity of a star file.
    Check {
        star: PathBuf,
        #[arg(long)]
        assoc: bool,
        #[arg(long)]
        homogeneity: bool,
    },
    /// Characteristic class in H²(A).
    CharClass {
        star: PathBuf,
        #[command(flatten)]
        cap: Cap,
    },
    /// Homogeneous equivalence: a verified witness or the relative class.
    Equiv {
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        cap: Cap,
        /// Where to write the witness.
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Moyal product on R^{2d}.
    Moyal {
        #[arg(short = 'd')]
        dim: usize,
        #[arg(long, value_parser = ["paper", "standard", "weyl"])]
        variant: String,
        #[command(flatten)]
        order: Order,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// PBW product: associativity on monomials and the extracted star product.
    Gutt {
        presentation: String,
        #[arg(long = "B")]
        b: Option<PathBuf>,
        #[arg(long = "degree-cap")]
        degree_cap: u32,
        #[arg(short = 'K', long = "order", value_parser = clap::value_parser!(u64).range(1..))]
        k: Option<u64>,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Whether the linear submanifold of a constraint is coisotropic.
    Coisotropic {
        presentation: String,
        #[arg(long)]
        constraint: PathBuf,
    },
    /// First violation of projectability, if any.
    CheckProjectable {
        star: PathBuf,
        #[arg(long)]
        constraint: PathBuf,
    },
    /// Reduced star product of a projectable one.
    Reduce {
        star: PathBuf,
        #[arg(long)]
        constraint: PathBuf,
        #[arg(short = 'o')]
        output: PathBuf,
        /// Degree of the monomials used to verify the reduction identity.
        #[arg(long, default_value_t = 2)]
        check_degree: u32,
    },
    /// Order-by-order representation on the submanifold, or its obstruction class.
    Represent {
        star: PathBuf,
        #[arg(long)]
        submanifold: PathBuf,
        #[command(flatten)]
        cap: Cap,
    },
    /// Projectable star product with prescribed reduction.
    MakeProjectable {
        presentation: String,
        #[arg(long)]
        constraint: PathBuf,
        #[arg(long = "B")]
        b: Option<PathBuf>,
        #[command(flatten)]
        order: Order,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Quantization commutes with reduction: compare both paths in H²(A_red).
    QrCheck {
        presentation: String,
        #[arg(long)]
        constraint: PathBuf,
        #[arg(long = "B")]
        b: Option<PathBuf>,
        #[command(flatten)]
        order: Order,
        #[command(flatten)]
        cap: Cap,
    },
    /// Randomized identity suites; the seed only drives sampling.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

/// Failure of a command before a verdict: bad input (exit 2) or an internal identity that
/// should hold by theory (exit 3).
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TheoremViolation(_) | Error::Infeasible { .. } => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, content: &str) -> Result<(), Failure> {
    use std::io::Write;
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let fail = |e: std::io::Error| input(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(content.as_bytes()).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

/// A presentation file, or `preset:<name>` for a built-in one.
pub fn load_presentation(arg: &str) -> Result<AlgebroidPresentation, Failure> {
    if let Some(name) = arg.strip_prefix("preset:") {
        return AlgebroidPresentation::preset(name).ok_or_else(|| input(format!("unknown preset `{name}`")));
    }
    Ok(parse_presentation(&read(Path::new(arg))?)?)
}

fn load_form(a: &AlgebroidPresentation, path: Option<&PathBuf>) -> Result<Option<AForm>, Failure> {
    match path {
        None => Ok(None),
        Some(p) => {
            let f = parse_form(a.spec(), &read(p)?)?;
            if f.degree() != 2 {
                return Err(input("the twist must be a 2-form"));
            }
            Ok(Some(f))
        }
    }
}

fn load_constraint(path: &Path) -> Result<ConstraintData, Failure> {
    Ok(parse_constraint(&read(path)?)?)
}

fn load_star(path: &Path) -> Result<StarSeries, Failure> {
    Ok(parse_star(&read(path)?)?)
}

fn load_verified(path: &Path) -> Result<StarSeries, Failure> {
    Ok(parse_star_verified(&read(path)?)?)
}

fn hbar_text(p: &HbarPoly) -> String {
    p.to_string()
}

fn sha256(s: &str) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(s.as_bytes()))
}

fn write_star(path: &Path, star: &StarSeries) -> Result<Value, Failure> {
    let text = render_star(star);
    write_atomic(path, &text)?;
    Ok(json!({ "path": path.display().to_string(), "sha256": sha256(&text) }))
}

fn poly_pair(first: &Poly, second: &Poly, value: &Poly) -> Value {
    json!({ "first": first.to_string(), "second": second.to_string(), "value": value.to_string() })
}

/// Runs a command and returns its report and verdict.
pub fn run(command: &Command) -> Result<(Value, Verdict), Failure> {
    match command {
        Command::Validate { presentation } => {
            let a = load_presentation(presentation)?;
            let v = a.validate();
            let mut r = Report::new("validate", None, None);
            r.set("dim_base", a.base())
                .set("rank", a.rank())
                .set("presentation_sha256", presentation_hash(&a))
                .set("failures", v.failures.clone());
            Ok(r.finish(Verdict::of(v.is_valid())))
        }
        Command::Cohomology { presentation, degree, cap } => {
            let a = load_presentation(presentation)?;
            let h = a.cohomology(*degree, cap.cap)?;
            let mut r = Report::new("cohomology", None, h.cap);
            r.set("degree", *degree)
                .set("dim", h.dim())
                .set("basis", h.basis.iter().map(|b| report::form(b, a.names())).collect::<Vec<_>>());
            Ok(r.finish(Verdict::Pass))
        }
        Command::BuildStar { presentation, b, order, output } => {
            let a = load_presentation(presentation)?;
            let twist = load_form(&a, b.as_ref())?;
            let k = order.k as usize;
            let star = build_star(&a, twist.as_ref(), k)?;
            let mut r = Report::new("build-star", Some(k), None);
            r.set("presentation_sha256", presentation_hash(&a)).set("output", write_star(output, &star)?);
            Ok(r.finish(Verdict::Pass))
        }
        Command::Check { star, assoc, homogeneity } => {
            let s = load_star(star)?;
            let both = !assoc && !homogeneity;
            let mut r = Report::new("check", Some(s.order()), None);
            let mut ok = true;
            if *assoc || both {
                let d = s.first_defect()?;
                ok &= d.is_none();
                r.set("first_associativity_defect", d);
            }
            if *homogeneity || both {
                let h = s.first_inhomogeneous();
                ok &= h.is_none();
                r.set("first_inhomogeneous_order", h);
            }
            Ok(r.finish(Verdict::of(ok)))
        }
        Command::CharClass { star, cap } => {
            let s = load_verified(star)?;
            let c = characteristic_class(&s, cap.cap)?;
            let mut r = Report::new("char-class", Some(s.order()), c.cap);
            r.set("class", report::class(&c, s.presentation().names()));
            Ok(r.finish(Verdict::Pass))
        }
        Command::Equiv { first, second, cap, output } => {
            let a = load_verified(first)?;
            let b = load_verified(second)?;
            let mut r = Report::new("equiv", Some(a.order()), cap.cap);
            match decide_equivalence(&a, &b, cap.cap)? {
                Equivalence::Equivalent(w) => {
                    verify_equivalence(&w, &a, &b, 2)?;
                    r.set("equivalent", true);
                    if let Some(path) = output {
                        let text = render_witness(a.presentation(), &w);
                        write_atomic(path, &text)?;
                        r.set("witness", json!({ "path": path.display().to_string(), "sha256": sha256(&text) }));
                    }
                    Ok(r.finish(Verdict::Pass))
                }
                Equivalence::Distinct(c) => {
                    r.set("equivalent", false).set("relative_class", report::class(&c, a.presentation().names()));
                    Ok(r.finish(Verdict::Fail))
                }
            }
        }
        Command::Moyal { dim, variant, order, output } => {
            let v = MoyalVariant::parse(variant).expect("restricted by clap");
            let k = order.k as usize;
            let star = moyal_star(*dim, v, k)?;
            let spec = star.spec();
            let defect = star.first_defect()?;
            let inhom = star.first_inhomogeneous();
            let mut table = Vec::new();
            for a in 0..*dim {
                for b in 0..*dim {
                    let c = star.commutator(&Poly::x(spec, a), &Poly::xi(spec, b))?;
                    table.push(json!({ "q": a + 1, "p": b + 1, "commutator": hbar_text(&c) }));
                }
            }
            let mut r = Report::new("moyal", Some(k), None);
            r.set("variant", v.name())
                .set("first_associativity_defect", defect)
                .set("first_inhomogeneous_order", inhom)
                .set("commutators", table);
            if let Some(path) = output {
                r.set("output", write_star(path, &star)?);
            }
            Ok(r.finish(Verdict::of(defect.is_none() && inhom.is_none())))
        }
        Command::Gutt { presentation, b, degree_cap, k, output } => {
            let a = load_presentation(presentation)?;
            let twist = load_form(&a, b.as_ref())?;
            let mut uea = TwistedUea::new(&a, twist.as_ref())?;
            let failure = gutt_associativity_failure(&mut uea, a.spec(), *degree_cap)?;
            let k = k.map(|k| k as usize);
            let mut r = Report::new("gutt", k, None);
            r.set("degree_cap", *degree_cap).set(
                "associativity_failure",
                failure.as_ref().map(|t| t.iter().map(|p| p.to_string()).collect::<Vec<_>>()),
            );
            if let Some(k) = k {
                let star = gutt_as_series(&a, twist.as_ref(), k, None)?;
                let c = characteristic_class(&star, None)?;
                r.set("class", report::class(&c, a.names()));
                if let Some(path) = output {
                    r.set("output", write_star(path, &star)?);
                }
            }
            Ok(r.finish(Verdict::of(failure.is_none())))
        }
        Command::Coisotropic { presentation, constraint } => {
            let a = load_presentation(presentation)?;
            let d = load_constraint(constraint)?;
            let sub = Submanifold::new(&a, &d.x_out, &d.fibre_k)?;
            let c = coisotropic_check(&sub);
            let mut r = Report::new("coisotropic", None, None);
            r.set("witness", c.witness.as_ref().map(|(f, g, v)| poly_pair(f, g, v)));
            Ok(r.finish(Verdict::of(c.is_coisotropic())))
        }
        Command::CheckProjectable { star, constraint } => {
            let s = load_star(star)?;
            let cp = ConstraintPresentation::new(s.presentation(), load_constraint(constraint)?)?;
            let v = projectability_check(&s, &cp)?;
            let mut r = Report::new("check-projectable", Some(s.order()), None);
            r.set(
                "violation",
                v.as_ref().map(|v| {
                    json!({
                        "condition": v.condition.label(),
                        "order": v.order,
                        "first": v.first.to_string(),
                        "second": v.second.to_string(),
                        "value": v.value.to_string(),
                    })
                }),
            );
            Ok(r.finish(Verdict::of(v.is_none())))
        }
        Command::Reduce { star, constraint, output, check_degree } => {
            let s = load_verified(star)?;
            let cp = ConstraintPresentation::new(s.presentation(), load_constraint(constraint)?)?;
            let mut r = Report::new("reduce", Some(s.order()), None);
            if let Some(v) = projectability_check(&s, &cp)? {
                r.set("violation", json!({ "condition": v.condition.label(), "order": v.order }));
                return Ok(r.finish(Verdict::Fail));
            }
            let red = reduce_star(&s, &cp)?;
            verify_reduction(&s, &red, &cp, *check_degree)?;
            r.set("reduced_presentation_sha256", presentation_hash(red.presentation()))
                .set("check_degree", *check_degree)
                .set("output", write_star(output, &red)?);
            Ok(r.finish(Verdict::Pass))
        }
        Command::Represent { star, submanifold, cap } => {
            let s = load_verified(star)?;
            let d = load_constraint(submanifold)?;
            let sub = Submanifold::new(s.presentation(), &d.x_out, &d.fibre_k)?;
            let mut r = Report::new("represent", Some(s.order()), cap.cap);
            let verdict = match solve_representation(&s, &sub, cap.cap)? {
                RepresentOutcome::Represented(rep) => {
                    verify_representation(&s, &rep, 2)?;
                    r.set("outcome", "represented").set("represented_order", rep.order());
                    Verdict::Pass
                }
                RepresentOutcome::NotCoisotropic { first, second, bracket } => {
                    r.set("outcome", "not-coisotropic").set("witness", poly_pair(&first, &second, &bracket));
                    Verdict::Fail
                }
                RepresentOutcome::Obstructed { order, form, class } => {
                    let names = sub.sub_presentation()?.names().to_vec();
                    r.set("outcome", "obstructed").set("obstructed_order", order).set(
                        "obstruction",
                        json!({ "form": report::form(&form, &names), "coordinates": report::scalars(&class) }),
                    );
                    Verdict::Fail
                }
            };
            if coisotropic_check(&sub).is_coisotropic() && s.order() >= 2 {
                let p = pullback_class(&s, &sub, cap.cap)?;
                r.set("pullback_class", report::scalars(&p.coordinates));
            }
            Ok(r.finish(verdict))
        }
        Command::MakeProjectable { presentation, constraint, b, order, output, witness } => {
            let a = load_presentation(presentation)?;
            let twist = load_form(&a, b.as_ref())?;
            let cp = ConstraintPresentation::new(&a, load_constraint(constraint)?)?;
            let k = order.k as usize;
            let made = make_projectable(&cp, twist.as_ref(), k)?;
            let mut r = Report::new("make-projectable", Some(k), None);
            r.set("reduced_twist", report::form(&made.reduced_twist, cp.a_red().names()))
                .set("reduced_presentation_sha256", presentation_hash(cp.a_red()));
            if let Some(path) = output {
                r.set("output", write_star(path, &made.star)?);
            }
            if let Some(path) = witness {
                let text = render_witness(&a, &made.witness);
                write_atomic(path, &text)?;
                r.set("witness", json!({ "path": path.display().to_string(), "sha256": sha256(&text) }));
            }
            Ok(r.finish(Verdict::Pass))
        }
        Command::QrCheck { presentation, constraint, b, order, cap } => {
            let a = load_presentation(presentation)?;
            let twist = load_form(&a, b.as_ref())?.unwrap_or_else(|| AForm::zero(a.spec(), 2));
            let cp = ConstraintPresentation::new(&a, load_constraint(constraint)?)?;
            let k = order.k as usize;
            let q = qr_diagram_check(&cp, &twist, k, cap.cap)?;
            let mut r = Report::new("qr-check", Some(k), cap.cap);
            r.set("direct", report::scalars(&q.direct))
                .set("via_projectable", report::scalars(&q.via_projectable))
                .set("projectable_class", report::scalars(&q.projectable))
                .set("upper", json!([report::scalars(&q.upper.0), report::scalars(&q.upper.1)]))
                .set("lower", json!([report::scalars(&q.lower.0), report::scalars(&q.lower.1)]));
            Ok(r.finish(Verdict::of(q.commutes())))
        }
        Command::Selftest { seed, cases } => {
            let mut checks = selftest::dgla_suite(*seed, *cases)?;
            checks.extend(selftest::retraction_suite(*seed, (*cases).max(1) / 2)?);
            let ok = checks.iter().all(|c| c.passed());
            let mut r = Report::new("selftest", None, None);
            r.set("seed", *seed).set(
                "checks",
                checks
                    .iter()
                    .map(|c| json!({ "name": c.name, "cases": c.cases, "failures": c.failures }))
                    .collect::<Vec<_>>(),
            );
            Ok(r.finish(Verdict::of(ok)))
        }
    }
}

/// Runs `cli`, prints its report and returns the process exit code.
pub fn execute(cli: &Cli) -> u8 {
    match run(&cli.command) {
        Ok((value, verdict)) => {
            let text = match cli.format {
                Format::Json => report::to_json(&value),
                Format::Text => report::to_text(&value),
            };
            print!("{text}");
            if let Some(path) = &cli.report {
                if let Err(f) = write_atomic(path, &report::to_json(&value)) {
                    eprintln!("error: {}", f.message);
                    return f.code;
                }
            }
            verdict.code()
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
