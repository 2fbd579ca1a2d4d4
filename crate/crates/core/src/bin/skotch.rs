use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use skotch::adversary::{estimate_forgery, run_trials, AdversaryError, ForgeryEstimate, GameTranscript};
use skotch::plane::Plane;
use skotch::retrieval::RetrievalStructure;
use skotch::rng::{Coins, Stream};
use skotch::scheme::{encode, LabelMap, SchemeError};
use skotch::spec::{parse_adversary, parse_graph, parse_scheme, SpecError};

#[derive(Parser)]
#[command(name = "skotch", about = "Randomized adjacency sketches and forgery experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a graph in the edge-list text format.
    Gen {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Label a graph.
    Label {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode one pair from a label file.
    Decode {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        u: usize,
        #[arg(long)]
        v: usize,
    },
    /// Estimate the forgery rate of an adversary.
    Attack {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        graph: String,
        #[arg(long)]
        adv: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write every game transcript as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Sweep schemes, graphs and adversaries over grids of d and eps.
    /// `{d}` and `{eps}` in specs are substituted.
    Bench {
        #[arg(long, value_delimiter = ';', required = true)]
        schemes: Vec<String>,
        #[arg(long, value_delimiter = ';', required = true)]
        graphs: Vec<String>,
        #[arg(long, value_delimiter = ';', required = true)]
        advs: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "3")]
        d: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.25")]
        eps: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inspect the projective plane of order p.
    Plane {
        #[arg(long)]
        p: u64,
        /// Print the elements and the incidence matrix.
        #[arg(long)]
        dump: bool,
    },
    /// Build random retrieval structures and check them.
    RetrievalDemo {
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        r: u32,
        #[arg(long, default_value_t = 1 << 20)]
        universe: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Usage(String),
    Domain(String),
    Other(String),
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        match e {
            SpecError::Scheme(s) => s.into(),
            e => Failure::Usage(e.to_string()),
        }
    }
}

impl From<SchemeError> for Failure {
    fn from(e: SchemeError) -> Self {
        match e {
            SchemeError::Domain(_) => Failure::Domain(e.to_string()),
            SchemeError::Parameter(_) => Failure::Usage(e.to_string()),
            SchemeError::Encode(_) => Failure::Other(e.to_string()),
        }
    }
}

impl From<AdversaryError> for Failure {
    fn from(e: AdversaryError) -> Self {
        match e {
            AdversaryError::Scheme(s) => s.into(),
            AdversaryError::Instance(_) => Failure::Domain(e.to_string()),
            AdversaryError::Parameter(_) => Failure::Usage(e.to_string()),
        }
    }
}

/// Everything a command produces, written only once it has fully succeeded.
#[derive(Default)]
struct Output {
    stdout: String,
    files: Vec<(PathBuf, String)>,
}

impl Output {
    fn emit(&mut self, path: Option<PathBuf>, text: String) {
        match path {
            Some(p) => self.files.push((p, text)),
            None => self.stdout.push_str(&text),
        }
    }
}

fn csv_of(rows: &[ForgeryEstimate]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::Other(e.to_string()))?;
    }
    if rows.is_empty() {
        w.write_record(ForgeryEstimate::csv_header().split(','))
            .map_err(|e| Failure::Other(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Other(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Other(e.to_string()))
}

#[derive(Serialize)]
struct Report<'a> {
    estimate: &'a ForgeryEstimate,
    transcripts: &'a [GameTranscript],
}

fn trials_ok(trials: u64) -> Result<(), Failure> {
    if trials == 0 {
        Err(Failure::Usage("--trials must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn run(cmd: Cmd) -> Result<Output, Failure> {
    let mut out = Output::default();
    match cmd {
        Cmd::Gen { graph, out: path } => {
            let (g, _) = parse_graph(&graph)?;
            out.emit(path, g.to_text());
        }
        Cmd::Label {
            scheme,
            graph,
            seed,
            out: path,
        } => {
            let s = parse_scheme(&scheme)?;
            let (g, _) = parse_graph(&graph)?;
            out.emit(path, encode(&*s, &g, seed)?.to_text());
        }
        Cmd::Decode { scheme, labels, u, v } => {
            let s = parse_scheme(&scheme)?;
            let text = std::fs::read_to_string(&labels).map_err(|e| Failure::Usage(format!("{}: {e}", labels.display())))?;
            let map = LabelMap::from_text(&text).map_err(|e| Failure::Usage(e.to_string()))?;
            if map.label_bits != s.label_bits() {
                return Err(Failure::Domain(format!(
                    "labels are {} bits wide, {} expects {}",
                    map.label_bits,
                    s.name(),
                    s.label_bits()
                )));
            }
            let get = |x: usize| map.labels.get(x).ok_or_else(|| Failure::Usage(format!("vertex {x} out of range")));
            out.stdout = format!("{}\n", s.decode(get(u)?, get(v)?) as u8);
        }
        Cmd::Attack {
            scheme,
            graph,
            adv,
            trials,
            seed,
            out: path,
            json,
        } => {
            trials_ok(trials)?;
            let s = parse_scheme(&scheme)?;
            let (g, id) = parse_graph(&graph)?;
            let a = parse_adversary(&adv)?;
            let est = match &json {
                Some(jpath) => {
                    let (est, transcripts) = run_trials(&s, &g, &id, &*a, trials, seed)?;
                    let report = Report {
                        estimate: &est,
                        transcripts: &transcripts,
                    };
                    let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Other(e.to_string()))?;
                    out.files.push((jpath.clone(), text + "\n"));
                    est
                }
                None => estimate_forgery(&s, &g, &id, &*a, trials, seed)?,
            };
            out.emit(path, csv_of(&[est])?);
        }
        Cmd::Bench {
            schemes,
            graphs,
            advs,
            d,
            eps,
            trials,
            seed,
            out: path,
        } => {
            trials_ok(trials)?;
            let mut rows = Vec::new();
            let mut seen = std::collections::BTreeSet::new();
            for &dv in &d {
                for ev in &eps {
                    let fill = |t: &str| t.replace("{d}", &dv.to_string()).replace("{eps}", ev);
                    for st in &schemes {
                        for gt in &graphs {
                            for at in &advs {
                                let cell = (fill(st), fill(gt), fill(at));
                                if !seen.insert(cell.clone()) {
                                    continue;
                                }
                                let s = parse_scheme(&cell.0)?;
                                let (g, id) = parse_graph(&cell.1)?;
                                let a = parse_adversary(&cell.2)?;
                                match estimate_forgery(&s, &g, &id, &*a, trials, seed) {
                                    Ok(est) => rows.push(est),
                                    Err(e @ (AdversaryError::Instance(_) | AdversaryError::Scheme(SchemeError::Domain(_)))) => {
                                        eprintln!("skipping {} / {} / {}: {e}", cell.0, cell.1, cell.2)
                                    }
                                    Err(e) => return Err(e.into()),
                                }
                            }
                        }
                    }
                }
            }
            if rows.is_empty() {
                return Err(Failure::Domain("no cell of the grid could be run".into()));
            }
            out.emit(path, csv_of(&rows)?);
        }
        Cmd::Plane { p, dump } => {
            let plane = Plane::new(p).map_err(|e| Failure::Usage(e.to_string()))?;
            let size = plane.size();
            let mut text = format!("order {p}\nelements {size}\nincident per element {}\n", p + 1);
            if dump {
                for i in 0..size {
                    let [a, b, c] = plane.coords(i);
                    writeln!(text, "{i}: ({a}, {b}, {c})").expect("string write");
                }
                for i in 0..size {
                    let row: Vec<&str> = (0..size)
                        .map(|j| if plane.incident_idx(i, j) { "1" } else { "0" })
                        .collect();
                    writeln!(text, "{}", row.join(" ")).expect("string write");
                }
            }
            out.stdout = text;
        }
        Cmd::RetrievalDemo { n, r, universe, seed } => {
            if r == 0 || r > 64 || (n as u64) > universe {
                return Err(Failure::Usage("need 1 <= r <= 64 and n <= universe".into()));
            }
            let mut rng = Stream::new(seed);
            let mut keys = std::collections::BTreeSet::new();
            while keys.len() < n {
                keys.insert(rng.below(universe));
            }
            let mask = if r == 64 { u64::MAX } else { (1u64 << r) - 1 };
            let pairs: Vec<(u64, u64)> = keys.iter().map(|&k| (k, rng.word() & mask)).collect();
            let st = RetrievalStructure::build(&pairs, universe, r, &mut rng).map_err(|e| Failure::Other(e.to_string()))?;
            let exact = pairs.iter().all(|&(k, v)| st.query(k).ok() == Some(v));
            let mut text = String::new();
            writeln!(text, "keys {n}\nvalue bits {r}\nhash functions {}", st.hash_count()).expect("string write");
            writeln!(text, "table cells {}\nserialized bits {}", st.table().len(), st.serialized_bits()).expect("string write");
            writeln!(text, "all stored keys retrieved: {exact}").expect("string write");
            if !exact {
                return Err(Failure::Other("retrieval mismatch".into()));
            }
            out.stdout = text;
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(out) => {
            for (path, text) in &out.files {
                if let Err(e) = std::fs::write(path, text) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            print!("{}", out.stdout);
            ExitCode::SUCCESS
        }
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (2, m),
                Failure::Domain(m) => (3, m),
                Failure::Other(m) => (1, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
