use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use wfst::cascade::{self, DEMO_GRAMMAR, DEMO_LEXICON};
use wfst::harness::check_suite;
use wfst::textio::peek_ring;
use wfst::{
    compose, determinize, equivalence_pushed, minimize_with_delta, push_weights, read_fst,
    shortest_distance_to_final, shortest_path, twins_check_bounded, write_fst, EncodeTable, Fst,
    LogWeight, ProbabilityWeight, Ring, Semiring, SymbolTable, TropicalWeight, TwinsOutcome,
    DEFAULT_DELTA, DEFAULT_MAX_STATES,
};

/// Weighted finite-state transducer tools. Inputs are read from the named
/// file or from stdin when the file is omitted or `-`; results go to stdout.
///
/// Exit status: 0 on success, 1 when `equal`, `twins`, `demo-cascade` or
/// `check` report a negative result, 2 on usage or input errors.
#[derive(Debug, Parser)]
#[command(name = "wfst", version)]
struct Cli {
    /// Semiring: tropical, log or prob.
    #[arg(long, global = true, env = "WFST_RING", default_value = "tropical")]
    ring: Ring,

    /// Limit on the number of states created by determinization.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_STATES, value_parser = positive)]
    max_states: usize,

    /// Tolerance for comparing weights.
    #[arg(long, global = true, default_value_t = DEFAULT_DELTA, value_parser = non_negative)]
    delta: f64,

    /// Input-side symbol table (`symbol<TAB>id` lines). Labels are numeric without one.
    #[arg(long, global = true)]
    isymbols: Option<PathBuf>,

    /// Output-side symbol table.
    #[arg(long, global = true)]
    osymbols: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compose two transducers.
    Compose {
        left: PathBuf,
        right: PathBuf,
        /// Symbol table for the shared middle alphabet.
        #[arg(long)]
        msymbols: Option<PathBuf>,
    },
    /// Weighted determinization (transducers are determinized on label pairs).
    Determinize { input: Option<PathBuf> },
    /// Push weights toward the initial state.
    Push { input: Option<PathBuf> },
    /// Minimize a deterministic automaton (on label pairs for transducers).
    Minimize { input: Option<PathBuf> },
    /// Remove states that are not on a successful path.
    Connect { input: Option<PathBuf> },
    /// Exit 0 if the two automata define the same weighted relation, 1 otherwise.
    Equal { first: PathBuf, second: PathBuf },
    /// Bounded search for a twins-property violation (tropical only).
    Twins {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
    /// Print the distance from every state to the final states.
    ShortestDistance { input: Option<PathBuf> },
    /// Extract the best path (tropical only).
    ShortestPath { input: Option<PathBuf> },
    /// Print state, arc, initial and final counts and structural flags.
    Info { input: Option<PathBuf> },
    /// Build and decode the lexicon/grammar recognition cascade.
    DemoCascade {
        /// Lexicon TSV: `word<TAB>prob<TAB>phone phone ...`. Defaults to the bundled demo.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// Grammar TSV: `w1<TAB>w2<TAB>prob`. Defaults to the bundled demo.
        #[arg(long)]
        grammar: Option<PathBuf>,
        /// Space-separated phone string to decode.
        #[arg(long)]
        phones: Option<String>,
        /// Write L.fst, G.fst, phones.syms and words.syms into this directory.
        #[arg(long)]
        write_fsts: Option<PathBuf>,
    },
    /// Run the randomized property suite.
    Check {
        #[arg(long, default_value_t = 200, value_parser = positive)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(d) if d >= 0.0 && d.is_finite() => Ok(d),
        Ok(_) => Err("must be a finite non-negative number".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("wfst: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Check { n, seed } => {
            let report = check_suite(*n, *seed);
            print!("{report}");
            Ok(if report.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::DemoCascade {
            lexicon,
            grammar,
            phones,
            write_fsts,
        } => demo_cascade(
            cli,
            lexicon.as_deref(),
            grammar.as_deref(),
            phones.as_deref(),
            write_fsts.as_deref(),
        ),
        Command::Twins { input, max_len } => {
            require_tropical(cli, "twins")?;
            twins(cli, input.as_deref(), *max_len)
        }
        Command::ShortestPath { input } => {
            require_tropical(cli, "shortest-path")?;
            let io = Io::new(cli)?;
            let fst: Fst<TropicalWeight> = io.read(input.as_deref())?;
            io.write(&shortest_path(&fst)?)?;
            Ok(ExitCode::SUCCESS)
        }
        _ => match cli.ring {
            Ring::Tropical => run_generic::<TropicalWeight>(cli),
            Ring::Log => run_generic::<LogWeight>(cli),
            Ring::Probability => run_generic::<ProbabilityWeight>(cli),
        },
    }
}

fn require_tropical(cli: &Cli, command: &str) -> anyhow::Result<()> {
    if cli.ring != Ring::Tropical {
        bail!("{command} is only available for the tropical semiring");
    }
    Ok(())
}

fn read_input(path: Option<&Path>) -> anyhow::Result<String> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
        }
        _ => {
            let mut text = String::new();
            io::stdin()
                .read_to_string(&mut text)
                .context("reading stdin")?;
            Ok(text)
        }
    }
}

fn load_symbols(path: Option<&Path>) -> anyhow::Result<Option<SymbolTable>> {
    path.map(|p| {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        SymbolTable::parse(&text).with_context(|| format!("parsing {}", p.display()))
    })
    .transpose()
}

/// Symbol tables and ring shared by the file-reading commands.
struct Io {
    ring: Ring,
    isyms: Option<SymbolTable>,
    osyms: Option<SymbolTable>,
}

impl Io {
    fn new(cli: &Cli) -> anyhow::Result<Self> {
        Ok(Io {
            ring: cli.ring,
            isyms: load_symbols(cli.isymbols.as_deref())?,
            osyms: load_symbols(cli.osymbols.as_deref())?,
        })
    }

    fn read<W: Semiring>(&self, path: Option<&Path>) -> anyhow::Result<Fst<W>> {
        self.read_with(path, self.isyms.as_ref(), self.osyms.as_ref())
    }

    fn read_with<W: Semiring>(
        &self,
        path: Option<&Path>,
        isyms: Option<&SymbolTable>,
        osyms: Option<&SymbolTable>,
    ) -> anyhow::Result<Fst<W>> {
        let name = path.map_or("stdin".to_string(), |p| p.display().to_string());
        let text = read_input(path)?;
        let ring = peek_ring(&text).with_context(|| format!("parsing {name}"))?;
        if ring != self.ring {
            bail!(
                "{name} holds a {ring} automaton but --ring is {}",
                self.ring
            );
        }
        read_fst(&text, isyms, osyms).with_context(|| format!("parsing {name}"))
    }

    fn write<W: Semiring>(&self, fst: &Fst<W>) -> anyhow::Result<()> {
        let text = write_fst(
            &fst.fold_initial_weight()?,
            self.isyms.as_ref(),
            self.osyms.as_ref(),
        )?;
        io::stdout().write_all(text.as_bytes())?;
        Ok(())
    }
}

/// Applies an acceptor algorithm to a transducer by treating each label pair
/// as one label.
fn on_pairs<W: Semiring>(
    fst: &Fst<W>,
    op: impl FnOnce(&Fst<W>) -> wfst::Result<Fst<W>>,
) -> anyhow::Result<Fst<W>> {
    if fst.is_acceptor() {
        return Ok(op(fst)?);
    }
    let (encoded, table) = fst.encode();
    Ok(op(&encoded)?.decode(&table)?)
}

fn run_generic<W: Semiring>(cli: &Cli) -> anyhow::Result<ExitCode> {
    let io = Io::new(cli)?;
    match &cli.command {
        Command::Compose {
            left,
            right,
            msymbols,
        } => {
            let msyms = load_symbols(msymbols.as_deref())?;
            let a: Fst<W> = io.read_with(Some(left), io.isyms.as_ref(), msyms.as_ref())?;
            let b: Fst<W> = io.read_with(Some(right), msyms.as_ref(), io.osyms.as_ref())?;
            io.write(&compose(&a, &b)?)?;
        }
        Command::Determinize { input } => {
            let fst: Fst<W> = io.read(input.as_deref())?;
            io.write(&on_pairs(&fst, |f| determinize(f, cli.max_states))?)?;
        }
        Command::Push { input } => {
            let fst: Fst<W> = io.read(input.as_deref())?;
            io.write(&push_weights(&fst)?)?;
        }
        Command::Minimize { input } => {
            let fst: Fst<W> = io.read(input.as_deref())?;
            io.write(&on_pairs(&fst, |f| minimize_with_delta(f, cli.delta))?)?;
        }
        Command::Connect { input } => {
            let fst: Fst<W> = io.read(input.as_deref())?;
            io.write(&fst.connect())?;
        }
        Command::Equal { first, second } => {
            let a: Fst<W> = io.read(Some(first))?;
            let b: Fst<W> = io.read(Some(second))?;
            let mut table = EncodeTable::default();
            let (a, b) = (a.encode_with(&mut table), b.encode_with(&mut table));
            let det = |f: Fst<W>| -> anyhow::Result<Fst<W>> {
                Ok(if f.is_deterministic() {
                    f
                } else {
                    determinize(&f, cli.max_states)?
                })
            };
            if equivalence_pushed(&det(a)?, &det(b)?, cli.delta)? {
                println!("equal");
            } else {
                println!("not equal");
                return Ok(ExitCode::from(1));
            }
        }
        Command::ShortestDistance { input } => {
            let fst: Fst<W> = io.read(input.as_deref())?;
            let mut out = String::new();
            for (q, d) in shortest_distance_to_final(&fst)?.iter().enumerate() {
                out.push_str(&format!("{q}\t{d}\n"));
            }
            io::stdout().write_all(out.as_bytes())?;
        }
        Command::Info { input } => {
            let fst: Fst<W> = io.read(input.as_deref())?;
            print!("{}", info(&fst));
        }
        Command::Check { .. }
        | Command::DemoCascade { .. }
        | Command::Twins { .. }
        | Command::ShortestPath { .. } => unreachable!("handled before ring dispatch"),
    }
    Ok(ExitCode::SUCCESS)
}

fn info<W: Semiring>(fst: &Fst<W>) -> String {
    format!(
        "ring\t{}\nstates\t{}\narcs\t{}\ninitial\t{}\nfinal\t{}\ndeterministic\t{}\nacceptor\t{}\nacyclic\t{}\n",
        W::RING,
        fst.num_states(),
        fst.num_transitions(),
        fst.num_initials(),
        fst.num_finals(),
        fst.is_deterministic(),
        fst.is_acceptor(),
        fst.is_acyclic(),
    )
}

fn twins(cli: &Cli, input: Option<&Path>, max_len: usize) -> anyhow::Result<ExitCode> {
    let io = Io::new(cli)?;
    let fst: Fst<TropicalWeight> = io.read(input)?;
    let fst = if fst.is_acceptor() {
        fst.connect()
    } else {
        fst.encode().0.connect()
    };
    match twins_check_bounded(&fst, max_len)? {
        TwinsOutcome::HasTwins => {
            println!("twins property holds");
            Ok(ExitCode::SUCCESS)
        }
        TwinsOutcome::Inconclusive => {
            println!("no violation within length {max_len}; search was not exhaustive");
            Ok(ExitCode::SUCCESS)
        }
        TwinsOutcome::ViolationWitness(w) => {
            println!(
                "violation: states {} and {} reached by {:?}, cycle {:?} weighs {} vs {}",
                w.states.0, w.states.1, w.access, w.cycle, w.weights.0, w.weights.1
            );
            Ok(ExitCode::from(1))
        }
    }
}

fn demo_cascade(
    cli: &Cli,
    lexicon: Option<&Path>,
    grammar: Option<&Path>,
    phones: Option<&str>,
    write_fsts: Option<&Path>,
) -> anyhow::Result<ExitCode> {
    require_tropical(cli, "demo-cascade")?;
    let read = |p: Option<&Path>, default: &str| -> anyhow::Result<String> {
        match p {
            Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
            None => Ok(default.to_string()),
        }
    };
    let entries =
        cascade::parse_lexicon(&read(lexicon, DEMO_LEXICON)?).context("parsing lexicon")?;
    let spec = cascade::parse_grammar(&read(grammar, DEMO_GRAMMAR)?).context("parsing grammar")?;
    let (mut phone_syms, mut word_syms) = (SymbolTable::new(), SymbolTable::new());
    let l = cascade::build_lexicon(&entries, &mut phone_syms, &mut word_syms)?;
    let g = cascade::build_grammar(&spec, &mut word_syms)?;

    if let Some(dir) = write_fsts {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let files = [
            ("L.fst", write_fst(&l, Some(&phone_syms), Some(&word_syms))?),
            ("G.fst", write_fst(&g, Some(&word_syms), Some(&word_syms))?),
            ("phones.syms", phone_syms.to_text()),
            ("words.syms", word_syms.to_text()),
        ];
        for (name, text) in files {
            let path = dir.join(name);
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        }
    }

    let graph = cascade::build_recognition_graph(&l, &g, cli.max_states)?;
    for s in &graph.stages {
        eprintln!("{}\t{} states\t{} arcs", s.stage, s.states, s.transitions);
    }
    let Some(phones) = phones else {
        return Ok(ExitCode::SUCCESS);
    };
    let x = cascade::labels_of(phones, &phone_syms)?;
    match cascade::decode(&graph.optimized, &x) {
        Ok((words, weight)) => {
            let words: Vec<&str> = words
                .iter()
                .map(|&w| word_syms.symbol(w).unwrap_or("?"))
                .collect();
            println!("{}\t{weight}", words.join(" "));
            Ok(ExitCode::SUCCESS)
        }
        Err(wfst::Error::NoPath) => {
            println!("no path");
            Ok(ExitCode::from(1))
        }
        Err(e) => Err(e.into()),
    }
}
