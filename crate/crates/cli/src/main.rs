mod table1;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bell_excess::bounds::{
    bounds_report, chsh_observables, circulant3_observables, quantum_witness, BoundsReport, CMatrix,
};
use bell_excess::catalog::{builtin, builtin_keys, detect_regular_equivalent, parse_catalogue_text, MatrixKind};
use bell_excess::constructions::{
    circulant, fourier_square, gyni_tensor, is_hadamard, mquwm_check, paley_hadamard, sylvester, SignMatrix,
};
use bell_excess::format::{parse_game_matrix, parse_game_tensor, write_game_matrix, write_game_tensor};
use bell_excess::game::{game_matrix_from_tensor, GameMatrix};
use bell_excess::lhv::{count_optimizers, lhv_value, normalize_to_allplus, LhvConfig};
use bell_excess::tightness::tightness_report;
use bell_excess::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "bell-excess", version, about = "LHV values, bounds and tightness of bipartite Bell expressions")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct RunConfig {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "BELL_EXCESS_THREADS", default_value_t = 0)]
    threads: usize,
    /// Tolerance for float comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Largest number of Alice assignments to enumerate.
    #[arg(long, global = true, default_value_t = 1 << 26, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Largest number of optimal strategies to materialise.
    #[arg(long, global = true, default_value_t = 1 << 22, value_parser = clap::value_parser!(u64).range(1..))]
    optimizer_cap: u64,
    /// Write results to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args, Clone)]
struct Input {
    /// Game matrix file (`n m q` header), or a sign matrix with --as-core.
    #[arg(value_name = "FILE")]
    path: Option<PathBuf>,
    /// Same as the positional FILE.
    #[arg(long = "file", value_name = "FILE", conflicts_with = "path")]
    file: Option<PathBuf>,
    /// Embedded Hadamard matrix ORDER/INDEX, used as a correlation core.
    #[arg(long, value_name = "ORDER/INDEX")]
    builtin: Option<String>,
    /// Read the input as the core of a two-outcome correlation game.
    #[arg(long)]
    as_core: bool,
    /// Read FILE as a probability-form tensor (`m q` header).
    #[arg(long, conflicts_with = "as_core")]
    tensor: bool,
}

#[derive(Subcommand)]
enum Command {
    /// LHV value with an optimal strategy.
    Lhv {
        #[command(flatten)]
        input: Input,
        /// Also count all optimal strategies.
        #[arg(long)]
        count: bool,
    },
    /// Sum of all entries.
    Excess {
        #[command(flatten)]
        input: Input,
    },
    /// Best, numerical-radius, row-sum and spectral bounds.
    Bounds {
        #[command(flatten)]
        input: Input,
        /// Rephase to the all-plus optimum before computing the bounds.
        #[arg(long)]
        normalize: bool,
    },
    /// Optimal vertices, affine rank and facet verdict of a two-outcome core.
    Tightness {
        #[command(flatten)]
        input: Input,
    },
    /// Generate a matrix family member.
    Construct {
        #[command(subcommand)]
        family: Family,
    },
    /// Embedded Hadamard matrices.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Check pairs of weighing matrices for quasi-unbiasedness.
    VerifyMquwm {
        /// Catalogue file of weighing matrices.
        first: PathBuf,
        /// Second file; without it, all pairs within FIRST are checked.
        second: Option<PathBuf>,
        #[arg(long)]
        a: u64,
    },
    /// Bell operator value for preset observables.
    Witness {
        #[arg(long, value_enum)]
        preset: Preset,
    },
    /// Reproduce the tightness table for Hadamard orders up to 20.
    Table1,
}

#[derive(Subcommand)]
enum Family {
    /// Sylvester Hadamard matrix of order 2^K.
    Sylvester { k: u32 },
    /// Quadratic-residue Hadamard matrix of order L+1 (L prime, 3 mod 4).
    Paley { l: u64 },
    /// Circulant matrix from its first row, e.g. `-1 1 1 1`.
    Circulant {
        #[arg(allow_negative_numbers = true, required = true)]
        row: Vec<i8>,
    },
    /// Fourier-square game with Q settings and outcomes.
    FourierSquare { q: usize },
    /// Guess-your-neighbour's-input game in probability form.
    Gyni { q: usize },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Show {
        #[arg(value_name = "ORDER/INDEX")]
        key: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// Core circ(0,-1,1) with rotated qubit observables.
    Circ3,
    /// CHSH with the Tsirelson observables.
    Chsh,
}

enum Failure {
    Input(String),
    Budget(String),
    Golden(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

impl RunConfig {
    fn lhv(&self) -> LhvConfig {
        LhvConfig {
            threads: self.threads,
            budget: self.budget as u128,
            optimizer_cap: self.optimizer_cap as u128,
            ..LhvConfig::default()
        }
    }

    fn emit(&self, table: &str, value: &serde_json::Value) -> CliResult<()> {
        let text = match self.format {
            Format::Table => table.to_string(),
            Format::Json => format!("{value}\n"),
        };
        match &self.output {
            Some(p) => fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn parse_key(s: &str) -> CliResult<(usize, usize)> {
    let (o, i) = s
        .split_once('/')
        .ok_or_else(|| Failure::Input(format!("expected ORDER/INDEX, got {s:?}")))?;
    let p = |t: &str| t.parse::<usize>().map_err(|_| Failure::Input(format!("bad number {t:?}")));
    Ok((p(o)?, p(i)?))
}

/// Sign or integer matrix: `+`/`-`/`0` rows, or whitespace-separated integers.
fn parse_core_text(text: &str) -> CliResult<Vec<Vec<i64>>> {
    if let Ok(ms) = parse_catalogue_text(text, MatrixKind::Any) {
        if let [m] = ms.as_slice() {
            let n = m.order();
            return Ok((0..n).map(|i| m.row(i).iter().map(|&v| v as i64).collect()).collect());
        }
    }
    let rows: Vec<Vec<i64>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|_| Failure::Input(format!("bad core entry {t:?}"))))
                .collect()
        })
        .collect::<CliResult<_>>()?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Failure::Input("core must be a non-empty square matrix".into()));
    }
    Ok(rows)
}

/// What an input resolved to.
struct Loaded {
    label: String,
    game: GameMatrix,
    /// Core rows when the input was given as a core.
    core: Option<Vec<Vec<i64>>>,
    sign: Option<SignMatrix>,
}

fn load(input: &Input) -> CliResult<Loaded> {
    let core_game = |rows: &[Vec<i64>]| -> CliResult<GameMatrix> {
        let n = rows.len();
        let core = bell_excess::game::CorrelationCore::from_int_matrix(n, &rows.concat())?;
        Ok(bell_excess::game::embed_core(&core))
    };
    match (&input.builtin, input.path.as_ref().or(input.file.as_ref())) {
        (Some(_), Some(_)) => Err(Failure::Input("give either FILE or --builtin, not both".into())),
        (Some(key), None) => {
            let (o, i) = parse_key(key)?;
            let e = builtin(o, i)?;
            let rows: Vec<Vec<i64>> =
                (0..o).map(|r| e.matrix.row(r).iter().map(|&v| v as i64).collect()).collect();
            Ok(Loaded {
                label: format!("{o}/{i}"),
                game: core_game(&rows)?,
                core: Some(rows),
                sign: Some(e.matrix),
            })
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path)?;
            let label = path.display().to_string();
            if input.as_core {
                let rows = parse_core_text(&text)?;
                let sign = rows
                    .iter()
                    .all(|r| r.iter().all(|v| (-1..=1).contains(v)))
                    .then(|| {
                        SignMatrix::from_rows(&rows.iter().map(|r| r.iter().map(|&v| v as i8).collect()).collect::<Vec<_>>())
                    })
                    .transpose()?;
                Ok(Loaded {
                    label,
                    game: core_game(&rows)?,
                    core: Some(rows),
                    sign,
                })
            } else if input.tensor {
                Ok(Loaded {
                    label,
                    game: game_matrix_from_tensor(&parse_game_tensor(&text)?),
                    core: None,
                    sign: None,
                })
            } else {
                Ok(Loaded {
                    label,
                    game: parse_game_matrix(&text)?,
                    core: None,
                    sign: None,
                })
            }
        }
        (None, None) => Err(Failure::Input("no input: give FILE or --builtin ORDER/INDEX".into())),
    }
}

fn cmd_lhv(run: &RunConfig, input: &Input, count: bool) -> CliResult<()> {
    let l = load(input)?;
    let cfg = run.lhv();
    let r = lhv_value(&l.game, &cfg)?;
    let n_opt = if count {
        let plain = LhvConfig {
            fast_path: false,
            ..cfg.clone()
        };
        Some(count_optimizers(&l.game, &plain)?)
    } else {
        None
    };
    let mut table = format!(
        "input: {}\nm: {}\nq: {}\nC: {}\nwitness: {}\n",
        l.label,
        l.game.m(),
        l.game.q(),
        r.value,
        r.witness
    );
    if let Some(c) = n_opt {
        table.push_str(&format!("optimizers: {c}\n"));
    }
    let value = json!({
        "input": l.label,
        "m": l.game.m(),
        "q": l.game.q(),
        "C": r.value,
        "C_float": r.value.to_f64(),
        "witness": {
            "alice": r.witness.alice_exponents(),
            "bob": r.witness.bob_exponents(),
        },
        "optimizer_count": n_opt.map(|c| c.to_string()),
    });
    run.emit(&table, &value)
}

fn cmd_excess(run: &RunConfig, input: &Input) -> CliResult<()> {
    let l = load(input)?;
    let e = l.game.excess()?;
    let core_excess: Option<i64> = l.core.as_ref().map(|rows| rows.iter().flatten().sum());
    let mut table = format!("input: {}\nexcess: {}\n", l.label, e);
    if let Some(c) = core_excess {
        table.push_str(&format!("core excess: {c}\n"));
    }
    run.emit(
        &table,
        &json!({"input": l.label, "excess": e, "excess_float": e.to_f64(), "core_excess": core_excess}),
    )
}

fn bounds_table(label: &str, b: &BoundsReport) -> String {
    let opt = |v: Option<f64>| v.map_or("unavailable".to_string(), |x| format!("{x:.12}"));
    let mut s = format!("input: {label}\nn: {}\nexcess: {:.12}\n", b.n, b.excess);
    if let (Some(l), Some(u)) = (&b.best_lower, &b.best_upper) {
        s.push_str(&format!("best_lower: {l}\nbest_upper: {u}\n"));
    }
    s.push_str(&format!(
        "numerical_radius: {:.12}\nradius_bound: {:.12}\nnu: {:.12}\nnu_bound: {:.12}\nsigma: {:.12}\nsigma_bound: {:.12}\nrho: {}\nsaturated: {}\n",
        b.numerical_radius,
        b.radius_bound,
        b.nu,
        b.nu_bound,
        b.sigma,
        b.sigma_bound,
        opt(b.rho),
        b.saturated
    ));
    if let (Some(g), Some(gb)) = (b.gamma, b.gamma_bound) {
        s.push_str(&format!("gamma: {g}\ngamma_bound: {gb}\n"));
    }
    s.push_str(&format!("normalized: {}\n", b.normalized));
    s
}

fn cmd_bounds(run: &RunConfig, input: &Input, normalize: bool) -> CliResult<()> {
    let l = load(input)?;
    let mut game = l.game.clone();
    if normalize {
        let cfg = run.lhv();
        let r = lhv_value(&game, &cfg)?;
        game = normalize_to_allplus(&game, &r.witness, &cfg)?;
    }
    let report = match (&l.core, input.as_core || input.builtin.is_some()) {
        (Some(rows), true) if !normalize => {
            let n = rows.len();
            let m = CMatrix::from_real(n, &rows.iter().flatten().map(|&v| v as f64).collect::<Vec<_>>())
                .map_err(Failure::from)?;
            let hadamard = l.sign.as_ref().is_some_and(is_hadamard);
            bounds_report(&m, hadamard, false, run.tol)
        }
        _ => bounds_report(&CMatrix::from(&game), false, normalize, run.tol),
    };
    let value = serde_json::to_value(&report).map_err(|e| Failure::Input(e.to_string()))?;
    run.emit(&bounds_table(&l.label, &report), &json!({"input": l.label, "bounds": value}))
}

fn cmd_tightness(run: &RunConfig, input: &Input) -> CliResult<()> {
    let l = load(input)?;
    let rows = l
        .core
        .ok_or_else(|| Failure::Input("tightness needs a two-outcome core (--as-core or --builtin)".into()))?;
    let n = rows.len();
    let core = bell_excess::game::CorrelationCore::from_int_matrix(n, &rows.concat())?;
    let r = tightness_report(&core, &run.lhv())?;
    let table = format!(
        "input: {}\nm: {}\nC: {}\nvertices: {}\nstrategy_pairs: {}\naffine_rank: {}\ntight: {}\nregular_equivalent: {}\n",
        l.label, r.m, r.lhv_value, r.vertex_count, r.strategy_pairs, r.affine_rank, r.tight, r.regular_equivalent
    );
    let value = serde_json::to_value(&r).map_err(|e| Failure::Input(e.to_string()))?;
    run.emit(&table, &json!({"input": l.label, "report": value}))
}

fn cmd_construct(run: &RunConfig, family: &Family) -> CliResult<()> {
    let cfg = run.lhv();
    let sign_out = |name: String, m: SignMatrix| -> CliResult<()> {
        let text = m.to_text();
        run.emit(
            &text,
            &json!({"family": name, "order": m.order(), "rows": text.lines().collect::<Vec<_>>(), "hadamard": is_hadamard(&m)}),
        )
    };
    match family {
        Family::Sylvester { k } => sign_out(format!("sylvester({k})"), sylvester(*k)),
        Family::Paley { l } => sign_out(format!("paley({l})"), paley_hadamard(*l)?),
        Family::Circulant { row } => sign_out("circulant".into(), circulant(row)?),
        Family::FourierSquare { q } => {
            let m = fourier_square(*q)?;
            let c = lhv_value(&m, &cfg)?.value;
            let text = write_game_matrix(&m);
            eprintln!("C = {c}");
            run.emit(&text, &json!({"family": "fourier-square", "q": q, "C": c, "matrix": text}))
        }
        Family::Gyni { q } => {
            let t = gyni_tensor(*q)?;
            let m = game_matrix_from_tensor(&t);
            let c = lhv_value(&m, &cfg)?.value;
            let scaled = (q * q) as f64 * c.to_f64();
            let text = write_game_tensor(&t);
            eprintln!("C = {c} (probability form), {scaled} at matrix scale q^2");
            run.emit(
                &text,
                &json!({"family": "gyni", "q": q, "C": c, "C_scaled": scaled, "tensor": text}),
            )
        }
    }
}

fn cmd_catalog(run: &RunConfig, action: &CatalogAction) -> CliResult<()> {
    match action {
        CatalogAction::List => {
            let cfg = run.lhv();
            let mut table = String::from("order index regular_equivalent\n");
            let mut items = Vec::new();
            for (o, i) in builtin_keys() {
                let e = builtin(o, i)?;
                let reg = detect_regular_equivalent(&e.matrix, &cfg)?;
                table.push_str(&format!("{o} {i} {reg}\n"));
                items.push(json!({"order": o, "index": i, "regular_equivalent": reg}));
            }
            run.emit(&table, &json!(items))
        }
        CatalogAction::Show { key } => {
            let (o, i) = parse_key(key)?;
            let e = builtin(o, i)?;
            let text = e.matrix.to_text();
            run.emit(&text, &json!({"order": o, "index": i, "rows": text.lines().collect::<Vec<_>>()}))
        }
    }
}

fn read_weighing(path: &Path) -> CliResult<Vec<SignMatrix>> {
    Ok(parse_catalogue_text(&fs::read_to_string(path)?, MatrixKind::Weighing)?)
}

fn cmd_verify_mquwm(run: &RunConfig, first: &Path, second: Option<&Path>, a: u64) -> CliResult<()> {
    let xs = read_weighing(first)?;
    let pairs: Vec<(usize, usize, SignMatrix, SignMatrix)> = match second {
        Some(p) => {
            let ys = read_weighing(p)?;
            xs.iter()
                .enumerate()
                .flat_map(|(i, x)| ys.iter().enumerate().map(move |(j, y)| (i, j, x.clone(), y.clone())))
                .collect()
        }
        None => (0..xs.len())
            .flat_map(|i| (i + 1..xs.len()).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, xs[i].clone(), xs[j].clone()))
            .collect(),
    };
    if pairs.is_empty() {
        return Err(Failure::Input("no pairs to check".into()));
    }
    let mut table = String::new();
    let mut items = Vec::new();
    let mut all_ok = true;
    for (i, j, x, y) in pairs {
        match mquwm_check(&x, &y, a) {
            Ok(p) => {
                table.push_str(&format!("{i} {j} ok(l={}) MQUWM({},{},{},{})\n", p.l, p.m, p.k, p.l, p.a));
                items.push(json!({"i": i, "j": j, "ok": true, "m": p.m, "k": p.k, "l": p.l, "a": p.a}));
            }
            Err(e) => {
                all_ok = false;
                table.push_str(&format!("{i} {j} fail: {e}\n"));
                items.push(json!({"i": i, "j": j, "ok": false, "reason": e.to_string()}));
            }
        }
    }
    run.emit(&table, &json!({"all_ok": all_ok, "pairs": items}))?;
    if all_ok {
        Ok(())
    } else {
        Err(Failure::Input("some pairs failed".into()))
    }
}

fn cmd_witness(run: &RunConfig, preset: Preset) -> CliResult<()> {
    let (name, game, (a, b)) = match preset {
        Preset::Circ3 => ("circ3", circulant(&[0, -1, 1])?.to_game(), circulant3_observables()),
        Preset::Chsh => ("chsh", sylvester(1).to_game(), chsh_observables()),
    };
    let w = quantum_witness(&game, &a, &b)?;
    run.emit(&format!("preset: {name}\nwitness: {w:.12}\n"), &json!({"preset": name, "witness": w}))
}

#[derive(Serialize)]
struct Table1Json<'a> {
    rows: &'a [table1::RowResult],
    all_match: bool,
}

fn cmd_table1(run: &RunConfig) -> CliResult<()> {
    let results = table1::run(&run.lhv())?;
    let all_match = results.iter().all(|r| r.matches);
    let value = serde_json::to_value(Table1Json {
        rows: &results,
        all_match,
    })
    .map_err(|e| Failure::Input(e.to_string()))?;
    run.emit(&table1::render(&results), &value)?;
    if all_match {
        Ok(())
    } else {
        Err(Failure::Golden(format!(
            "{} row(s) differ from the expected table",
            results.iter().filter(|r| !r.matches).count()
        )))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let run = &cli.run;
    let result = match &cli.cmd {
        Command::Lhv { input, count } => cmd_lhv(run, input, *count),
        Command::Excess { input } => cmd_excess(run, input),
        Command::Bounds { input, normalize } => cmd_bounds(run, input, *normalize),
        Command::Tightness { input } => cmd_tightness(run, input),
        Command::Construct { family } => cmd_construct(run, family),
        Command::Catalog { action } => cmd_catalog(run, action),
        Command::VerifyMquwm { first, second, a } => cmd_verify_mquwm(run, first, second.as_deref(), *a),
        Command::Witness { preset } => cmd_witness(run, *preset),
        Command::Table1 => cmd_table1(run),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("refused: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Golden(msg)) => {
            eprintln!("mismatch: {msg}");
            ExitCode::from(3)
        }
    }
}
