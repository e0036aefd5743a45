use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use qmf::congr::{
    build_chi, star_primes, verify_cong_eis, verify_ep_minus_one, verify_mod23_on, verify_theta_pair, Verdict,
};
use qmf::exactnum::residue;
use qmf::fexp::RationalJson;
use qmf::forms::{eisenstein_h, eisenstein_h_coeff, g_h, g_h_coeff, x10, x12, x14};
use qmf::{BigRational, Expansion, TMatrix};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "qmf", version, about = "Fourier coefficients and congruences of quaternionic modular forms")]
struct Cli {
    /// Directory for persisted expansions.
    #[arg(long, global = true, env = "QMF_CACHE")]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print one Fourier coefficient.
    Coeff {
        #[arg(long)]
        form: Form,
        /// Index as n,m,a,b,c,d.
        #[arg(long = "T", value_name = "n,m,a,b,c,d", allow_hyphen_values = true)]
        t: TMatrix,
        #[arg(long = "mod", value_name = "p")]
        modulus: Option<u64>,
        /// Box depth for forms built by multiplication (default: max(n, m)).
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Run a congruence verifier and print its JSON report.
    Verify {
        theorem: Theorem,
        #[arg(long)]
        k: Option<i64>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 3)]
        depth: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print every coefficient on the box n, m <= max.
    Table {
        #[arg(long)]
        form: Form,
        #[arg(long)]
        max: u32,
        #[arg(long = "mod", value_name = "p")]
        modulus: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Theorem {
    Ramanujan,
    Theta,
    Mod23,
    Congeis,
    Ep1,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Form {
    E(i64),
    G(i64),
    X(i64),
}

impl FromStr for Form {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("unknown form {s:?}; expected EkH, GkH (k even, 4 <= k) or X10, X12, X14");
        let weight = |w: &str| w.parse::<i64>().ok().filter(|k| *k >= 4 && k % 2 == 0).ok_or_else(bad);
        if let Some(w) = s.strip_prefix('E').and_then(|r| r.strip_suffix('H')) {
            return weight(w).map(Form::E);
        }
        if let Some(w) = s.strip_prefix('G').and_then(|r| r.strip_suffix('H')) {
            return weight(w).map(Form::G);
        }
        match s {
            "X10" => Ok(Form::X(10)),
            "X12" => Ok(Form::X(12)),
            "X14" => Ok(Form::X(14)),
            _ => Err(bad()),
        }
    }
}

impl Form {
    fn name(self) -> String {
        match self {
            Form::E(k) => format!("E{k}H"),
            Form::G(k) => format!("G{k}H"),
            Form::X(k) => format!("X{k}"),
        }
    }

    fn weight(self) -> i64 {
        match self {
            Form::E(k) | Form::G(k) | Form::X(k) => k,
        }
    }

    fn build(self, depth: u32) -> anyhow::Result<Expansion> {
        Ok(match self {
            Form::E(k) => eisenstein_h(k, depth)?,
            Form::G(k) => g_h(k, depth)?,
            Form::X(10) => x10(depth),
            Form::X(12) => x12(depth),
            Form::X(_) => x14(depth),
        })
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(msg.into())
}

fn warn_depth(depth: u32) {
    if depth >= 5 {
        eprintln!("warning: depth {depth} makes form multiplication slow (minutes to hours)");
    }
}

fn expansion(form: Form, depth: u32, cache: Option<&Path>) -> anyhow::Result<Expansion> {
    let Some(dir) = cache else {
        return form.build(depth);
    };
    let path = dir.join(format!("{}-depth{depth}.json", form.name()));
    if path.exists() {
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        return Expansion::from_json(&text, form.weight(), depth)
            .with_context(|| format!("parsing {}", path.display()));
    }
    let f = form.build(depth)?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(&path, f.to_json()?).with_context(|| format!("writing {}", path.display()))?;
    Ok(f)
}

fn show_residue(x: &BigRational, p: u64) -> String {
    match residue(x, p) {
        Some(r) => r.to_string(),
        None => "not p-integral".into(),
    }
}

fn check_modulus(p: Option<u64>) -> anyhow::Result<()> {
    match p {
        Some(0) => Err(usage("--mod must be positive")),
        _ => Ok(()),
    }
}

fn cmd_coeff(
    form: Form,
    t: TMatrix,
    modulus: Option<u64>,
    depth: Option<u32>,
    cache: Option<&Path>,
) -> anyhow::Result<()> {
    check_modulus(modulus)?;
    let value = if !t.is_psd() {
        eprintln!("warning: {t} is not positive semidefinite; its coefficient is 0");
        BigRational::from_integer(0.into())
    } else {
        match form {
            Form::E(k) => eisenstein_h_coeff(k, &t)?,
            Form::G(k) => g_h_coeff(k, &t)?,
            Form::X(_) => {
                let need = t.n.max(t.m).max(1) as u32;
                let depth = depth.unwrap_or(need);
                if depth < need {
                    return Err(usage(format!("--depth {depth} does not contain {t}")));
                }
                warn_depth(depth);
                expansion(form, depth, cache)?.coeff(&t).expect("index lies in the box")
            }
        }
    };
    match modulus {
        Some(p) => writeln!(std::io::stdout(), "{value} ≡ {} (mod {p})", show_residue(&value, p))?,
        None => writeln!(std::io::stdout(), "{value}")?,
    }
    Ok(())
}

fn cmd_table(form: Form, max: u32, modulus: Option<u64>, format: Format, cache: Option<&Path>) -> anyhow::Result<()> {
    check_modulus(modulus)?;
    warn_depth(max);
    let f = expansion(form, max, cache)?;
    let mut out = std::io::stdout().lock();
    match format {
        Format::Csv => {
            let header = if modulus.is_some() { "T,coeff,residue" } else { "T,coeff" };
            writeln!(out, "{header}")?;
            for (t, a) in f.iter() {
                match modulus {
                    Some(p) => writeln!(out, "\"{t}\",{a},{}", show_residue(a, p))?,
                    None => writeln!(out, "\"{t}\",{a}")?,
                }
            }
        }
        Format::Json => {
            let rows: Vec<Value> = f
                .iter()
                .map(|(t, a)| {
                    let mut row = json!({ "T": t.to_string(), "coeff": RationalJson::from(a) });
                    if let Some(p) = modulus {
                        row["residue"] = residue(a, p).map_or(Value::Null, Value::from);
                    }
                    row
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?;
        }
    }
    Ok(())
}

fn run_verifier(
    theorem: Theorem,
    k: Option<i64>,
    p: Option<u64>,
    depth: u32,
    cache: Option<&Path>,
) -> anyhow::Result<Vec<Verdict>> {
    let need_k = || k.ok_or_else(|| usage("this verifier needs --k"));
    let need_p = || p.ok_or_else(|| usage("this verifier needs --p"));
    let precondition = |e: qmf::Error| usage(e.to_string());
    Ok(match theorem {
        Theorem::Ramanujan => {
            let k = need_k()?;
            let primes = match p {
                Some(p) => vec![p],
                None => star_primes(k).map_err(precondition)?,
            };
            if primes.is_empty() {
                return Err(usage(format!("no prime satisfies the condition for k = {k}")));
            }
            let mut out = Vec::new();
            for p in primes {
                out.push(build_chi(k, p, depth).map_err(precondition)?.report);
            }
            out
        }
        Theorem::Theta => {
            let (g4, g6) = (expansion(Form::G(4), depth, cache)?, expansion(Form::G(6), depth, cache)?);
            let (x10, x14) = (expansion(Form::X(10), depth, cache)?, expansion(Form::X(14), depth, cache)?);
            vec![
                verify_theta_pair("Theta(G4H) vs X10", &g4, &x10, 5),
                verify_theta_pair("Theta(G6H) vs X14", &g6, &x14, 7),
            ]
        }
        Theorem::Mod23 => vec![verify_mod23_on(&expansion(Form::X(14), depth, cache)?)],
        Theorem::Congeis => vec![verify_cong_eis(need_k()?, depth).map_err(precondition)?],
        Theorem::Ep1 => vec![verify_ep_minus_one(need_p()?, depth).map_err(precondition)?],
    })
}

fn cmd_verify(
    theorem: Theorem,
    k: Option<i64>,
    p: Option<u64>,
    depth: u32,
    out: Option<&Path>,
    cache: Option<&Path>,
) -> anyhow::Result<bool> {
    warn_depth(depth);
    let verdicts = run_verifier(theorem, k, p, depth, cache)?;
    let ok = verdicts.iter().all(Verdict::holds);
    let text = if verdicts.len() == 1 { verdicts[0].to_json()? } else { serde_json::to_string_pretty(&verdicts)? };
    match out {
        Some(path) => fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?,
        None => writeln!(std::io::stdout(), "{text}")?,
    }
    Ok(ok)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let cache = cli.cache.as_deref();
    match cli.command {
        Command::Coeff { form, t, modulus, depth } => cmd_coeff(form, t, modulus, depth, cache).map(|_| true),
        Command::Table { form, max, modulus, format } => cmd_table(form, max, modulus, format, cache).map(|_| true),
        Command::Verify { theorem, k, p, depth, out } => cmd_verify(theorem, k, p, depth, out.as_deref(), cache),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.downcast_ref::<std::io::Error>().is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
