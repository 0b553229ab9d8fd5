use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use vvhecke::hecke::{OperatorDescriptor, Tamper};
use vvhecke::lattice::{DiscriminantForm, Lattice};
use vvhecke::qseries::{vv_theta, vvmf, SumMode, VVQSeries};
use vvhecke::suites::{run_suite, Suite};
use vvhecke::weil::{parse_word, MetaplecticElement, WeilRep};
use vvhecke::{Error, Rational};

#[derive(Parser)]
#[command(
    name = "vvhecke",
    version,
    about = "Exact Weil representations and Hecke operators on vector-valued modular forms"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    #[value(name = "T")]
    T,
    #[value(name = "U")]
    U,
    #[value(name = "P")]
    P,
    #[value(name = "H")]
    H,
    #[value(name = "BS")]
    Bs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    All,
    DoubleCoset,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Weil,
    Theta,
    Hecke,
    Bs,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Elementary divisors, order and q-table of A(r).
    Discform {
        #[arg(long)]
        gram: PathBuf,
        #[arg(long, default_value_t = 1)]
        scale: u64,
    },
    /// Matrix of ρ on a word in S, T and t (= T⁻¹).
    Weil {
        #[arg(long)]
        gram: PathBuf,
        #[arg(long, default_value_t = 1)]
        scale: u64,
        #[arg(long, default_value = "")]
        word: String,
    },
    /// Vector-valued theta series as a vvmf-v1 file.
    Theta {
        #[arg(long)]
        gram: PathBuf,
        #[arg(long, default_value_t = 1)]
        scale: u64,
        #[arg(long)]
        trunc: Rational,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        zeta_order: Option<u64>,
    },
    /// Applies one operator to a vvmf-v1 file.
    Apply {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        op: Op,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long, value_enum, default_value = "all")]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        zeta_order: Option<u64>,
    },
    /// Runs a verification suite over the built-in lattices.
    Check {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Print one JSON record per check.
        #[arg(long)]
        json: bool,
        /// Debug: double the 𝒯 prefactor on left-hand sides.
        #[arg(long, hide = true)]
        tamper: bool,
    },
}

fn form(gram: &Path, scale: u64) -> Result<Arc<DiscriminantForm>, Error> {
    let text =
        std::fs::read_to_string(gram).map_err(|e| Error::Io(format!("{}: {e}", gram.display())))?;
    Ok(Arc::new(DiscriminantForm::new(
        &Lattice::parse(&text)?,
        scale,
    )?))
}

fn emit(psi: &VVQSeries, out: Option<&Path>, zeta: Option<u64>) -> Result<(), Error> {
    match out {
        Some(p) => vvmf::write(p, psi, zeta),
        None => {
            print!("{}", vvmf::to_string(psi, zeta)?);
            Ok(())
        }
    }
}

fn usage(msg: &str) -> Error {
    Error::Contract(msg.to_string())
}

fn descriptor(
    op: Op,
    r: Option<u64>,
    n: Option<u64>,
    p: Option<u64>,
    l: Option<u32>,
    mode: SumMode,
) -> Result<OperatorDescriptor, Error> {
    let only = |ok: bool, what: &str| if ok { Ok(()) } else { Err(usage(what)) };
    let d = match op {
        Op::T => {
            only(
                n.is_none() && p.is_none() && l.is_none(),
                "--op T takes only --r",
            )?;
            OperatorDescriptor::T {
                r: r.ok_or_else(|| usage("--op T needs --r"))?,
                mode,
            }
        }
        Op::U | Op::P | Op::H => {
            only(
                r.is_none() && p.is_none() && l.is_none(),
                "--op U/P/H take only --n",
            )?;
            let n = n.ok_or_else(|| usage("--op U/P/H need --n"))?;
            match op {
                Op::U => OperatorDescriptor::U { n },
                Op::P => OperatorDescriptor::P { n },
                _ => OperatorDescriptor::H { n, mode },
            }
        }
        Op::Bs => {
            only(r.is_none() && n.is_none(), "--op BS takes only --p and --l")?;
            let p = p.ok_or_else(|| usage("--op BS needs --p"))?;
            let l = l.ok_or_else(|| usage("--op BS needs --l"))?;
            OperatorDescriptor::Bs { p, l }
        }
    };
    d.validate()?;
    Ok(d)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.cmd {
        Cmd::Discform { gram, scale } => {
            let f = form(&gram, scale)?;
            println!("scale: {scale}");
            println!("divisors: {:?}", f.divisors());
            println!("order: {}", f.order());
            println!("coset\tq");
            for id in f.ids() {
                println!("{:?}\t{}", f.coords(id), f.q(id));
            }
        }
        Cmd::Weil { gram, scale, word } => {
            let gens = parse_word(&word)?;
            let w = WeilRep::new(form(&gram, scale)?);
            let m = w.rho_word(&gens)?;
            let el = MetaplecticElement::from_word(&gens);
            let cosets: Vec<_> = w.form().ids().map(|id| w.form().coords(id)).collect();
            let rows: Vec<_> = (0..m.size()).map(|i| m.row(i).to_vec()).collect();
            let doc = json!({
                "word": word,
                "matrix": el.m,
                "sign": el.sign,
                "cosets": cosets,
                "rho": rows,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        Cmd::Theta {
            gram,
            scale,
            trunc,
            out,
            zeta_order,
        } => {
            let th = vv_theta(form(&gram, scale)?, &trunc)?;
            emit(&th, out.as_deref(), zeta_order)?;
        }
        Cmd::Apply {
            input,
            op,
            r,
            n,
            p,
            l,
            mode,
            out,
            zeta_order,
        } => {
            let mode = match mode {
                Mode::All => SumMode::All,
                Mode::DoubleCoset => SumMode::DoubleCoset,
            };
            let d = descriptor(op, r, n, p, l, mode)?;
            let psi = vvmf::read(&input)?;
            let res = d.apply(&psi)?;
            emit(&res, out.as_deref(), zeta_order)?;
        }
        Cmd::Check {
            suite,
            seed,
            json,
            tamper,
        } => {
            let suite = match suite {
                SuiteArg::Weil => Suite::Weil,
                SuiteArg::Theta => Suite::Theta,
                SuiteArg::Hecke => Suite::Hecke,
                SuiteArg::Bs => Suite::Bs,
                SuiteArg::All => Suite::All,
            };
            let tamper = if tamper {
                Tamper::Prefactor
            } else {
                Tamper::None
            };
            let checks = run_suite(suite, seed, tamper);
            for c in &checks {
                if json {
                    println!("{}", c.record);
                } else {
                    println!(
                        "{} {}  {}",
                        if c.passed { "PASS" } else { "FAIL" },
                        c.name,
                        c.detail
                    );
                }
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            eprintln!("{} checks, {failed} failed", checks.len());
            if failed > 0 {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
