//! `troprank`: command-line front end over the JSON file formats.
//!
//! JSON results go to stdout, diagnostics to stderr. Exit codes: 0 success,
//! 1 user error, 2 a verification came out false, 3 an internal limit was hit.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use troprank::construction::{verify_phi_bounds, PhiBoundsOptions};
use troprank::io;
use troprank::matrix::{DEFAULT_PERMANENT_LIMIT, DEFAULT_RANK_BUDGET};
use troprank::puiseux::{lift_transform, lifting_check, row_reduce_symmetrized};
use troprank::rational::parse_rat;
use troprank::sampler::{
    hoeffding_bound, lemma_params, sample_good_tuple, separate, union_bound, SeparateOptions,
};
use troprank::{
    Error, Field, FieldElem, Matrix, PhiMatrix, PuiseuxPoly, Rat, SamplerParams, SeriesMatrix,
    SymmetrizedMatrix,
};

#[derive(Parser)]
#[command(name = "troprank", version, about = "Exact supertropical matrix ranks and liftings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Supertropical permanent of a square matrix.
    Permanent { matrix: PathBuf },
    /// Tropical rank with a witness submatrix.
    Rank {
        matrix: PathBuf,
        #[command(flatten)]
        mode: RankMode,
        /// Seed for --randomized.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sigma of a symmetrized matrix.
    Sigma { sym: PathBuf },
    /// Canonical symmetrized preimage of a supertropical matrix.
    Symmetrize {
        matrix: PathBuf,
        /// Labels for the rows (defaults to the matrix's row labels).
        #[arg(long = "I", num_args = 1.., value_delimiter = ',')]
        index: Option<Vec<String>>,
        /// Labels for the columns (defaults to the matrix's column labels).
        #[arg(long = "J", num_args = 1.., value_delimiter = ',')]
        extra: Option<Vec<String>>,
    },
    /// Checks rank T = rank Sigma(T) + |I|.
    VerifyAdditivity { sym: PathBuf },
    /// Rank of a series matrix over its coefficient field.
    SeriesRank { series: PathBuf },
    /// Whether a series matrix lifts a matrix (plain or symmetrized JSON).
    LiftCheck { matrix: PathBuf, series: PathBuf },
    /// Lifting of T built from a lifting of Sigma(T).
    LiftTransform {
        sym: PathBuf,
        series: PathBuf,
        /// Coefficient field, `Q` or `Fp:<p>`; rational coefficients are mapped into it.
        #[arg(long)]
        field: Option<String>,
    },
    /// Lifting of Sigma(T) recovered from a lifting of T.
    RowReduce { sym: PathBuf, series: PathBuf },
    /// Phi of a 0-1 matrix.
    BuildPhi {
        zeroone: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Checks that submatrices of Phi above d + k r are singular.
    VerifyPhi {
        phi: PathBuf,
        tuple: PathBuf,
        /// Sample this many submatrices per size instead of enumerating.
        #[arg(long)]
        randomized: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Samples a good tuple; prints it in tuple JSON.
    SampleGood {
        #[arg(long)]
        d: usize,
        #[arg(long, value_parser = rational)]
        q: Rat,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = troprank::sampler::DEFAULT_MAX_ATTEMPTS)]
        attempts: usize,
    },
    /// Full construction for an n x n matrix; writes its files into DIR.
    Separate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = rational)]
        alpha: Rat,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sampler parameters and probability bounds for (d, q).
    Bounds {
        #[arg(long)]
        d: usize,
        #[arg(long, value_parser = rational)]
        q: Rat,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct RankMode {
    /// Plain descending search; the witness is the lexicographically first.
    #[arg(long)]
    exhaustive: bool,
    /// Sample N submatrices per size; only the lower bound is certified.
    #[arg(long, value_name = "N")]
    randomized: Option<usize>,
}

fn rational(text: &str) -> Result<Rat, String> {
    parse_rat(text).map_err(|e| e.to_string())
}

enum Failure {
    User(String),
    /// The result is still printed; the check it reports came out false.
    Verification(Value, String),
    Limit(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SizeLimitExceeded { .. } | Error::AttemptsExhausted { .. } | Error::Overflow => {
                Failure::Limit(e.to_string())
            }
            Error::LemmaViolation => Failure::Verification(Value::Null, e.to_string()),
            _ => Failure::User(e.to_string()),
        }
    }
}

type Outcome = Result<Value, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::User(format!("{}: {e}", path.display())))
}

fn load<T>(path: &Path, parse: impl Fn(&str) -> troprank::Result<T>) -> Result<T, Failure> {
    parse(&read(path)?).map_err(|e| Failure::User(format!("{}: {e}", path.display())))
}

fn parsed(text: String) -> Value {
    serde_json::from_str(&text).expect("emitters produce valid JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    fs::write(dir.join(name), text)
        .map_err(|e| Failure::User(format!("{}: {e}", dir.join(name).display())))
}

fn permanent(path: &Path) -> Outcome {
    let m = load(path, io::matrix_from_json)?;
    let (value, method) = if m.nrows() <= DEFAULT_PERMANENT_LIMIT {
        (m.permanent()?, "expansion")
    } else {
        (m.permanent_fast()?, "assignment")
    };
    Ok(json!({
        "permanent": value,
        "nonsingular": value.is_tangible(),
        "method": method,
    }))
}

fn rank(path: &Path, mode: &RankMode, seed: u64) -> Outcome {
    let m = load(path, io::matrix_from_json)?;
    if let Some(samples) = mode.randomized {
        let s = m.tropical_rank_sampled(samples, seed)?;
        let mut out = serde_json::to_value(&s).expect("serializable");
        out["method"] = json!("randomized");
        return Ok(out);
    }
    let (w, method) = if mode.exhaustive {
        (m.tropical_rank()?, "exhaustive")
    } else {
        let w = m.tropical_rank_within(DEFAULT_RANK_BUDGET)?.ok_or_else(|| {
            Failure::Limit(format!(
                "exact rank needs more than {DEFAULT_RANK_BUDGET} submatrix tests; try --randomized"
            ))
        })?;
        (w, "exact")
    };
    Ok(json!({
        "tropical_rank": w.rank,
        "rows": w.rows,
        "cols": w.cols,
        "method": method,
    }))
}

fn symmetrize(path: &Path, index: Option<Vec<String>>, extra: Option<Vec<String>>) -> Outcome {
    let m = load(path, io::matrix_from_json)?;
    let index = index.unwrap_or_else(|| m.row_labels().to_vec());
    let extra = extra.unwrap_or_else(|| m.col_labels().to_vec());
    let t = SymmetrizedMatrix::symmetrize(&m, &index, &extra)?;
    Ok(parsed(io::symmetrized_to_json(&t)))
}

fn verify_additivity(path: &Path) -> Outcome {
    let t = load(path, io::symmetrized_from_json)?;
    let report = t.verify_rank_additivity()?;
    let out = serde_json::to_value(&report).expect("serializable");
    if report.holds {
        Ok(out)
    } else {
        Err(Failure::Verification(
            out,
            format!(
                "rank T = {} but rank Sigma(T) + |I| = {}",
                report.trop_t,
                report.trop_sigma + report.index_size
            ),
        ))
    }
}

/// Plain matrix, or the underlying matrix of a symmetrized one.
fn load_any_matrix(path: &Path) -> Result<Matrix, Failure> {
    let text = read(path)?;
    match io::matrix_from_json(&text) {
        Ok(m) => Ok(m),
        Err(plain) => io::symmetrized_from_json(&text)
            .map(|t| t.matrix().clone())
            .map_err(|_| Failure::User(format!("{}: {plain}", path.display()))),
    }
}

fn lift_check(matrix: &Path, series: &Path) -> Outcome {
    let a = load_any_matrix(matrix)?;
    let s = load(series, io::series_from_json)?;
    let lifts = lifting_check(&a, &s)?;
    let out = json!({ "lifts": lifts });
    if lifts {
        Ok(out)
    } else {
        Err(Failure::Verification(out, "not a lifting".into()))
    }
}

/// `s` with its coefficients mapped into `field`; only rational coefficients can move.
fn into_field(s: SeriesMatrix, field: Field) -> Result<SeriesMatrix, Failure> {
    if s.field() == field {
        return Ok(s);
    }
    if s.field() != Field::Rational {
        return Err(Failure::User(format!(
            "cannot map coefficients from {} to {field}",
            s.field()
        )));
    }
    let mut grid = Vec::with_capacity(s.nrows());
    for i in 0..s.nrows() {
        let mut row = Vec::with_capacity(s.ncols());
        for j in 0..s.ncols() {
            let terms = s
                .get(i, j)
                .terms()
                .iter()
                .map(|(c, e)| match c {
                    FieldElem::Q(q) => Ok((field.from_rat(q)?, e.clone())),
                    FieldElem::Fp { .. } => unreachable!("rational series"),
                })
                .collect::<troprank::Result<Vec<_>>>()?;
            row.push(PuiseuxPoly::from_terms(terms));
        }
        grid.push(row);
    }
    Ok(SeriesMatrix::new(
        field,
        s.row_labels().to_vec(),
        s.col_labels().to_vec(),
        grid,
    )?)
}

fn lift_transform_cmd(sym: &Path, series: &Path, field: Option<String>) -> Outcome {
    let t = load(sym, io::symmetrized_from_json)?;
    let mut s = load(series, io::series_from_json)?;
    if let Some(f) = field {
        let f: Field = f.parse()?;
        s = into_field(s, f)?;
    }
    let out = lift_transform(&t, &s)?;
    eprintln!("rank {} (input rank {}, |I| = {})", out.rank(), s.rank(), t.index_labels().len());
    Ok(parsed(io::series_to_json(&out)))
}

fn verify_phi(phi: &Path, tuple: &Path, randomized: Option<usize>, seed: u64) -> Outcome {
    let phi: PhiMatrix = load(phi, io::phi_from_json)?;
    let tuple = load(tuple, io::tuple_from_json)?;
    let opts = PhiBoundsOptions {
        randomized,
        seed,
        ..Default::default()
    };
    let report = verify_phi_bounds(&phi, &tuple, &opts)?;
    let out = serde_json::to_value(&report).expect("serializable");
    if report.all_singular {
        Ok(out)
    } else {
        let size = report
            .sweeps
            .iter()
            .find(|s| s.nonsingular_found)
            .map_or(0, |s| s.size);
        Err(Failure::Verification(
            out,
            format!("found a non-singular {size}x{size} submatrix above the bound"),
        ))
    }
}

fn sample_good(d: usize, q: Rat, seed: u64, attempts: usize) -> Outcome {
    let p = SamplerParams::unchecked_range(d, q, seed)?;
    if p.out_of_range {
        eprintln!("warning: q is outside (0, 1/10); the sampling lemma does not apply");
    }
    let s = sample_good_tuple(&p, attempts)?;
    eprintln!(
        "good tuple after {} attempt(s): {} ones, block size {}",
        s.attempts, s.check.ones_count, s.check.block_size
    );
    Ok(parsed(io::tuple_to_json(&s.tuple)))
}

fn separate_cmd(n: usize, alpha: &Rat, seed: u64, out: &Path) -> Outcome {
    let sep = separate(n, alpha, seed, &SeparateOptions::default())?;
    fs::create_dir_all(out).map_err(|e| Failure::User(format!("{}: {e}", out.display())))?;
    let mut report = sep.report;
    let files = [
        ("m", "m.json", io::zero_one_to_json(&sep.tuple.matrix)),
        ("tuple", "tuple.json", io::tuple_to_json(&sep.tuple)),
        ("phi", "phi.json", io::phi_to_json(&sep.phi)),
        ("phi0", "phi0.json", io::matrix_to_json(&sep.phi0)),
    ];
    for (key, name, text) in &files {
        write(out, name, text)?;
        report.files.insert(key.to_string(), name.to_string());
    }
    report.files.insert("report".into(), "report.json".into());
    let text = io::to_json(&report);
    write(out, "report.json", &text)?;
    for caveat in &report.hypothesis_caveats {
        eprintln!("caveat: {caveat}");
    }
    Ok(parsed(text))
}

fn bounds(d: usize, q: &Rat) -> Outcome {
    let lp = lemma_params(d, q)?;
    let hoeffding = hoeffding_bound(d)?;
    let union = union_bound(d, q, lp.r_used())?;
    Ok(json!({
        "lemma_params": lp,
        "hoeffding": hoeffding,
        "union": union,
    }))
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Permanent { matrix } => permanent(&matrix),
        Command::Rank { matrix, mode, seed } => rank(&matrix, &mode, seed),
        Command::Sigma { sym } => {
            let t = load(&sym, io::symmetrized_from_json)?;
            Ok(parsed(io::matrix_to_json(&t.sigma())))
        }
        Command::Symmetrize {
            matrix,
            index,
            extra,
        } => symmetrize(&matrix, index, extra),
        Command::VerifyAdditivity { sym } => verify_additivity(&sym),
        Command::SeriesRank { series } => {
            let s = load(&series, io::series_from_json)?;
            Ok(json!({ "rank": s.rank(), "field": s.field().to_string() }))
        }
        Command::LiftCheck { matrix, series } => lift_check(&matrix, &series),
        Command::LiftTransform { sym, series, field } => lift_transform_cmd(&sym, &series, field),
        Command::RowReduce { sym, series } => {
            let t = load(&sym, io::symmetrized_from_json)?;
            let s = load(&series, io::series_from_json)?;
            Ok(parsed(io::series_to_json(&row_reduce_symmetrized(&t, &s)?)))
        }
        Command::BuildPhi { zeroone, k } => {
            let m = load(&zeroone, io::zero_one_from_json)?;
            Ok(parsed(io::phi_to_json(&PhiMatrix::build(&m, k)?)))
        }
        Command::VerifyPhi {
            phi,
            tuple,
            randomized,
            seed,
        } => verify_phi(&phi, &tuple, randomized, seed),
        Command::SampleGood {
            d,
            q,
            seed,
            attempts,
        } => sample_good(d, q, seed, attempts),
        Command::Separate {
            n,
            alpha,
            seed,
            out,
        } => separate_cmd(n, &alpha, seed, &out),
        Command::Bounds { d, q } => bounds(d, &q),
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(text) = std::env::var("TROP_THREADS") else {
        return Ok(());
    };
    let threads: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::User(format!("TROP_THREADS={text:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::User(e.to_string()))
}

fn print(value: &Value) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value).expect("serializable");
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| run(cli.command));
    match outcome {
        Ok(value) => {
            print(&value);
            ExitCode::SUCCESS
        }
        Err(Failure::User(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(value, msg)) => {
            if !value.is_null() {
                print(&value);
            }
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Limit(msg)) => {
            eprintln!("limit exceeded: {msg}");
            ExitCode::from(3)
        }
    }
}
