use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use permup::corpus::{self, ExpectStatus, Expectation, Fixture};
use permup::monitor::TraceEvent;
use permup::nicheck::{
    inequivalent_vars, lemma_suite, random_program, run_transition, store_equiv, tini_suite, Adversary, EquivDef,
    GenConfig, LemmaReport, PairClass, PairSource, SuiteRow, DEFAULT_MAX_PAIRS,
};
use permup::{parse_program, LatticeSpec, Monitor, Outcome, Status, Stmt, Store, Strategy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::table::Table;
use crate::{CompareArgs, Exit, Format, MonitorArgs, RunArgs, SuiteArgs};

const BUILTINS: [&str; 7] = [
    "two_point",
    "chain3",
    "fig5",
    "powerset(1)",
    "powerset(2)",
    "powerset(3)",
    "powerset(4)",
];

/// Lemma-suite pairs per cell when --max-pairs is not given.
const DEFAULT_LEMMA_PAIRS: u64 = 64;

fn load_lattice(spec: &str) -> Result<LatticeSpec> {
    if let Ok(lat) = LatticeSpec::builtin(spec) {
        return Ok(lat);
    }
    let text = fs::read_to_string(spec)
        .with_context(|| format!("`{spec}` is neither a built-in lattice nor a readable file"))?;
    LatticeSpec::parse(&text).with_context(|| format!("lattice file {spec}"))
}

fn default_lattice(strategy: Strategy) -> LatticeSpec {
    match strategy {
        Strategy::Pup => LatticeSpec::powerset(2),
        _ => LatticeSpec::two_point(),
    }
}

fn load_program(path: &Path) -> Result<Stmt> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_program(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_store(path: &Path, m: &Monitor) -> Result<Store> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Store::parse(&text, m.family(), m.lattice()).with_context(|| format!("parsing {}", path.display()))
}

fn permit(strategy: Strategy, allow_unsound: bool) -> Result<()> {
    if strategy == Strategy::PuaUnsound {
        if !allow_unsound {
            bail!("pua_unsound is known to leak; pass --allow-unsound to run it anyway");
        }
        eprintln!("UNSOUND: pua_unsound ignores the pc when marking values partially leaked and does not enforce noninterference");
    }
    Ok(())
}

fn status_text(status: &Status) -> String {
    match status {
        Status::Completed => "completed".into(),
        Status::Halted { reason, loc } => format!("halted at line {}: {reason}", loc.line),
        Status::FuelExhausted { loc } => format!("out of fuel at line {}", loc.line),
    }
}

fn status_tsv(status: &Status) -> String {
    match status {
        Status::Completed => "status\tcompleted".into(),
        Status::Halted { reason, loc } => format!("status\thalted\t{reason}\t{}", loc.line),
        Status::FuelExhausted { loc } => format!("status\tfuel\t{}", loc.line),
    }
}

fn exit_for(status: &Status) -> Exit {
    match status {
        Status::Completed => Exit::Ok,
        Status::Halted { .. } => Exit::Halted,
        Status::FuelExhausted { .. } => Exit::Fuel,
    }
}

fn trace_table(lat: &LatticeSpec, events: &[TraceEvent]) -> Table {
    let mut t = Table::new(["line", "rule", "var", "old", "new", "pc"]);
    for e in events {
        t.push(e.tsv(lat).split('\t').map(str::to_string).collect::<Vec<_>>());
    }
    t
}

fn store_table(lat: &LatticeSpec, store: &Store) -> Table {
    let mut t = Table::new(["var", "value", "label"]);
    for (var, v) in store.iter() {
        t.push([var.to_string(), v.value.to_string(), v.label.display(lat).to_string()]);
    }
    t
}

struct Setup {
    lattice: LatticeSpec,
    lattice_name: String,
}

fn setup(args: &MonitorArgs) -> Result<Setup> {
    permit(args.strategy, args.allow_unsound)?;
    let (lattice, lattice_name) = match &args.lattice {
        Some(spec) => (load_lattice(spec)?, spec.clone()),
        None => {
            let lat = default_lattice(args.strategy);
            let name = if args.strategy == Strategy::Pup {
                "powerset(2)"
            } else {
                "two_point"
            };
            (lat, name.to_string())
        }
    };
    Ok(Setup { lattice, lattice_name })
}

pub fn run(args: &RunArgs) -> Result<Exit> {
    let prog = load_program(&args.program)?;
    let s = setup(&args.monitor)?;
    let m = Monitor::new(&s.lattice, args.monitor.strategy)?
        .with_fuel(args.monitor.fuel)
        .with_tracing(args.trace);
    let store = match &args.store {
        Some(path) => load_store(path, &m)?,
        None => Store::new(),
    };
    let out = m.run(&prog, &store)?;
    let lat = &s.lattice;
    match args.format {
        Format::Human => {
            println!("strategy  {}", m.strategy());
            println!("lattice   {}", s.lattice_name);
            println!("status    {}", status_text(&out.status));
            if args.trace {
                println!();
                print!("{}", trace_table(lat, &out.trace.events).render(Format::Human));
            }
            println!();
            print!("{}", store_table(lat, &out.store).render(Format::Human));
        }
        Format::Tsv => {
            if args.trace {
                for e in &out.trace.events {
                    println!("trace\t{}", e.tsv(lat));
                }
            }
            println!("{}", status_tsv(&out.status));
            for (var, v) in out.store.iter() {
                println!("store\t{var}\t{}\t{}", v.value, v.label.display(lat));
            }
        }
    }
    Ok(exit_for(&out.status))
}

fn parse_adversary(text: Option<&str>, strategy: Strategy, lat: &LatticeSpec) -> Result<Adversary> {
    match text {
        Some(t) => Adversary::parse(t, strategy, lat)
            .with_context(|| format!("no adversary `{t}` for {strategy} on this lattice")),
        None if strategy == Strategy::Pup => Ok(Adversary::Principal(0)),
        None => Ok(Adversary::Level(lat.bottom())),
    }
}

pub fn compare(args: &CompareArgs) -> Result<Exit> {
    if args.store.len() != 2 {
        bail!("compare needs exactly two --store files, got {}", args.store.len());
    }
    let prog = load_program(&args.program)?;
    let s = setup(&args.monitor)?;
    let lat = &s.lattice;
    let strategy = args.monitor.strategy;
    let m = Monitor::new(lat, strategy)?.with_fuel(args.monitor.fuel);
    let adv = parse_adversary(args.adversary.as_deref(), strategy, lat)?;
    let def = EquivDef::select(strategy, lat, adv);
    let s1 = load_store(&args.store[0], &m)?;
    let s2 = load_store(&args.store[1], &m)?;
    m.validate(&prog, &s1)?;
    m.validate(&prog, &s2)?;
    let initially = store_equiv(def, lat, adv, &s1, &s2)?;
    let o1 = m.run(&prog, &s1)?;
    let o2 = m.run(&prog, &s2)?;

    let mut steps = Table::new([
        "line", "rule", "var", "run 1", "pc", "|", "line", "rule", "var", "run 2", "pc",
    ]);
    let row = |e: Option<&TraceEvent>| -> Vec<String> {
        match e {
            Some(e) => {
                let cols: Vec<String> = e.tsv(lat).split('\t').map(str::to_string).collect();
                vec![
                    cols[0].clone(),
                    cols[1].clone(),
                    cols[2].clone(),
                    cols[4].clone(),
                    cols[5].clone(),
                ]
            }
            None => vec![String::new(); 5],
        }
    };
    let n = o1.trace.events.len().max(o2.trace.events.len());
    for i in 0..n {
        let mut r = row(o1.trace.events.get(i));
        r.push("|".into());
        r.extend(row(o2.trace.events.get(i)));
        steps.push(r);
    }

    let (verdict, code) = verdict(def, lat, adv, &o1, &o2)?;
    match args.format {
        Format::Human => {
            println!("strategy     {strategy}");
            println!("lattice      {}", s.lattice_name);
            println!("adversary    {} ({} equivalence)", adv.display(lat), def);
            println!(
                "initially    {}",
                if initially { "equivalent" } else { "not equivalent" }
            );
            println!("run 1        {}", status_text(&o1.status));
            println!("run 2        {}", status_text(&o2.status));
            println!();
            print!("{}", steps.render(Format::Human));
            println!();
            let mut finals = Table::new(["var", "run 1", "run 2"]);
            for (var, v) in o1.store.iter() {
                let other = o2
                    .store
                    .get(var)
                    .map(|w| w.display(lat).to_string())
                    .unwrap_or_default();
                finals.push([var.to_string(), v.display(lat).to_string(), other]);
            }
            print!("{}", finals.render(Format::Human));
            println!();
            println!("verdict      {verdict}");
        }
        Format::Tsv => {
            println!("initially\t{}", if initially { "equivalent" } else { "inequivalent" });
            println!("run1\t{}", status_tsv(&o1.status));
            println!("run2\t{}", status_tsv(&o2.status));
            print!("{}", steps.render(Format::Tsv));
            println!("verdict\t{verdict}");
        }
    }
    Ok(code)
}

fn verdict(def: EquivDef, lat: &LatticeSpec, adv: Adversary, o1: &Outcome, o2: &Outcome) -> Result<(String, Exit)> {
    Ok(match (&o1.status, &o2.status) {
        (Status::Completed, Status::Completed) => {
            let vars = inequivalent_vars(def, lat, adv, &o1.store, &o2.store)?;
            if vars.is_empty() {
                ("equivalent".into(), Exit::Ok)
            } else {
                (format!("not equivalent on {}", vars.join(", ")), Exit::Violations)
            }
        }
        (a, b) => {
            let which = if a.is_completed() {
                "run 2"
            } else if b.is_completed() {
                "run 1"
            } else {
                "both runs"
            };
            let code = if matches!(a, Status::FuelExhausted { .. }) || matches!(b, Status::FuelExhausted { .. }) {
                Exit::Fuel
            } else {
                Exit::Halted
            };
            (format!("no completed-pair comparison ({which} stopped)"), code)
        }
    })
}

/// A program to check with the lattice it was written for.
struct Subject {
    name: String,
    program: Stmt,
    lattice: LatticeSpec,
}

fn subjects(args: &SuiteArgs) -> Result<Vec<Subject>> {
    let lattice = match &args.lattice {
        Some(spec) => Some(load_lattice(spec)?),
        None => None,
    };
    if !args.programs.is_empty() {
        return args
            .programs
            .iter()
            .map(|p| {
                Ok(Subject {
                    name: p.display().to_string(),
                    program: load_program(p)?,
                    lattice: lattice.clone().unwrap_or_else(LatticeSpec::two_point),
                })
            })
            .collect();
    }
    if let Some(n) = args.random {
        let lat = lattice.unwrap_or_else(LatticeSpec::two_point);
        return Ok((0..n)
            .map(|i| {
                let seed = args.seed.wrapping_add(i);
                Subject {
                    name: format!("random:{seed}"),
                    program: random_program(&mut ChaCha8Rng::seed_from_u64(seed), GenConfig::default()),
                    lattice: lat.clone(),
                }
            })
            .collect());
    }
    Ok(corpus::fixtures()?
        .into_iter()
        .map(|f| Subject {
            name: f.name,
            program: f.program,
            lattice: f.lattice,
        })
        .collect())
}

fn strategies(args: &SuiteArgs) -> Result<Vec<Strategy>> {
    match args.strategy {
        Some(s) => {
            permit(s, args.allow_unsound)?;
            Ok(vec![s])
        }
        None => Ok(Strategy::SOUND.to_vec()),
    }
}

pub fn check_tini(args: &SuiteArgs) -> Result<Exit> {
    let strategies = strategies(args)?;
    let source = PairSource::Exhaustive {
        domain: vec![0, 1],
        cap: args.max_pairs.unwrap_or(DEFAULT_MAX_PAIRS),
        samples: args.samples,
        seed: args.seed,
    };
    let mut table = Table::new([
        "program",
        "strategy",
        "adversary",
        "relation",
        "pairs",
        "completed",
        "halted",
        "fuel",
        "mode",
        "violations",
    ]);
    let mut summary = Vec::new();
    let mut machine = Vec::new();
    for subject in subjects(args)? {
        let rows: Vec<SuiteRow> = tini_suite(
            &subject.program,
            &subject.lattice,
            &strategies,
            args.adversary.as_deref(),
            args.fuel,
            &source,
        )
        .with_context(|| subject.name.clone())?;
        for r in rows {
            let rep = &r.report;
            let mode = match rep.sampled_seed {
                Some(seed) => format!("sampled(seed {seed})"),
                None => "exhaustive".into(),
            };
            table.push([
                subject.name.clone(),
                r.strategy.to_string(),
                r.adversary.clone(),
                r.def.to_string(),
                rep.pairs_tested.to_string(),
                rep.completed_pairs.to_string(),
                rep.halted_pairs.to_string(),
                rep.fuel_exhausted_pairs.to_string(),
                mode,
                rep.violations.len().to_string(),
            ]);
            if !rep.is_clean() {
                summary.push(format!(
                    "{} under {} against {}: {} pairs differ on {}",
                    subject.name,
                    r.strategy,
                    r.adversary,
                    rep.violations.len(),
                    rep.violating_vars().join(", ")
                ));
            }
            for v in &rep.violations {
                for var in &v.vars {
                    machine.push(format!("VIOLATION\t{var}\t{}\t{}", v.hash1, v.hash2));
                }
            }
        }
    }
    print!("{}", table.render(args.format));
    if args.format == Format::Human {
        println!();
        println!("{} cells, {} with violations", table.len(), summary.len());
        for line in &summary {
            println!("  {line}");
        }
    }
    for line in &machine {
        println!("{line}");
    }
    Ok(if summary.is_empty() { Exit::Ok } else { Exit::Violations })
}

pub fn check_lemmas(args: &SuiteArgs) -> Result<Exit> {
    let strategies = strategies(args)?;
    let pairs = args.max_pairs.unwrap_or(DEFAULT_LEMMA_PAIRS);
    let mut table = Table::new(["program", "traces", "expression pairs", "confined runs", "violations"]);
    let mut total = LemmaReport::default();
    for subject in subjects(args)? {
        let r = lemma_suite(
            &subject.program,
            &subject.lattice,
            &strategies,
            args.fuel,
            pairs,
            args.seed,
        )
        .with_context(|| subject.name.clone())?;
        table.push([
            subject.name.clone(),
            r.traces.to_string(),
            r.expr_pairs.to_string(),
            r.confined_runs.to_string(),
            r.violations.len().to_string(),
        ]);
        total.absorb(LemmaReport {
            violations: r.violations.iter().map(|v| format!("{}: {v}", subject.name)).collect(),
            ..r
        });
    }
    print!("{}", table.render(args.format));
    if args.format == Format::Human {
        println!();
        println!(
            "{} traces, {} expression pairs, {} confined runs, {} violations",
            total.traces,
            total.expr_pairs,
            total.confined_runs,
            total.violations.len()
        );
    }
    for v in &total.violations {
        println!("LEMMA\t{v}");
    }
    Ok(if total.is_clean() { Exit::Ok } else { Exit::Violations })
}

pub fn check_transitions(format: Format) -> Result<Exit> {
    let mut cells = Vec::new();
    for f in corpus::fixtures()? {
        for exp in &f.expectations {
            if let Expectation::Transition { row, col } = exp {
                cells.push((f.name.clone(), run_transition(&f.program, *row, *col)?));
            }
        }
    }
    let failed = cells.iter().filter(|(_, r)| !r.passed()).count();
    match format {
        Format::Tsv => {
            for (name, r) in &cells {
                let verdict = if r.passed() { "pass" } else { "fail" };
                println!("{name}\t{}\t{}\t{verdict}\t{}", r.row, r.col, r.tried);
            }
        }
        Format::Human => {
            let mut grid = Table::new(
                std::iter::once("from \\ to".to_string()).chain(PairClass::ALL.iter().map(|c| c.to_string())),
            );
            for row in PairClass::ALL {
                let mut line = vec![row.to_string()];
                for col in PairClass::ALL {
                    let cell = cells.iter().find(|(_, r)| r.row == row && r.col == col);
                    line.push(match cell {
                        Some((_, r)) if r.passed() => "ok".into(),
                        Some(_) => "FAIL".into(),
                        None => "-".into(),
                    });
                }
                grid.push(line);
            }
            print!("{}", grid.render(Format::Human));
            println!();
            println!("{} cells, {failed} failed", cells.len());
        }
    }
    Ok(if failed == 0 { Exit::Ok } else { Exit::Violations })
}

pub fn check_lattice_laws(lattice: Option<&str>) -> Result<Exit> {
    let names: Vec<String> = match lattice {
        Some(spec) => vec![spec.to_string()],
        None => BUILTINS.iter().map(|s| s.to_string()).collect(),
    };
    let mut bad = 0;
    for name in &names {
        let lat = load_lattice(name)?;
        let violations = lat.law_violations();
        let verdict = if violations.is_empty() {
            "ok".to_string()
        } else {
            format!("{} violations", violations.len())
        };
        println!("{name}\t{} elements\t{verdict}", lat.len());
        for v in &violations {
            println!("  {v}");
        }
        bad += violations.len();
    }
    Ok(if bad == 0 { Exit::Ok } else { Exit::Violations })
}

fn expectation_summary(e: &Expectation) -> String {
    match e {
        Expectation::Run {
            store,
            strategy,
            status,
            ..
        } => match status {
            ExpectStatus::Completed => format!("{strategy} on {store}: completes"),
            ExpectStatus::Halted { reason, line } => format!("{strategy} on {store}: halts at line {line} ({reason})"),
        },
        Expectation::Trace {
            store,
            strategy,
            line,
            var,
            label,
            ..
        } => {
            format!("{strategy} on {store}: line {line} sets {var} to {label}")
        }
        Expectation::Guard {
            store,
            strategy,
            line,
            label,
        } => {
            format!("{strategy} on {store}: guard at line {line} is {label}")
        }
        Expectation::Transition { row, col } => format!("{row} -> {col}"),
    }
}

pub fn corpus_list() -> Result<Exit> {
    let fixtures = corpus::fixtures()?;
    let mut appendix = Table::new(["fixture", "lattice", "transition"]);
    for f in &fixtures {
        if f.expectations
            .iter()
            .all(|e| matches!(e, Expectation::Transition { .. }))
        {
            let t = f
                .expectations
                .iter()
                .map(expectation_summary)
                .collect::<Vec<_>>()
                .join("; ");
            appendix.push([f.name.clone(), f.lattice_name.clone(), t]);
            continue;
        }
        println!("{}  [{}]  {}", f.name, f.lattice_name, f.title.as_deref().unwrap_or(""));
        for e in f.expectations.iter().filter(|e| matches!(e, Expectation::Run { .. })) {
            println!("  {}", expectation_summary(e));
        }
    }
    println!();
    print!("{}", appendix.render(Format::Human));
    Ok(Exit::Ok)
}

pub fn corpus_replay(names: &[String]) -> Result<Exit> {
    let fixtures: Vec<Fixture> = if names.is_empty() {
        corpus::fixtures()?
    } else {
        names.iter().map(|n| corpus::fixture(n)).collect::<Result<_, _>>()?
    };
    let mut failed = 0;
    for f in &fixtures {
        let report = f.replay()?;
        let verdict = if report.passed() { "ok" } else { "FAILED" };
        println!("{} ({} checks): {verdict}", f.name, report.checks.len());
        for line in report.to_string().lines() {
            println!("  {line}");
        }
        failed += usize::from(!report.passed());
    }
    if failed > 0 {
        eprintln!("{failed} fixture(s) did not match their expectations");
        return Ok(Exit::Violations);
    }
    Ok(Exit::Ok)
}
