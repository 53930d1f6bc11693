use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use brickwork::demos::{demo, DEMOS};
use brickwork::io::{decode_circuit, decode_document, encode_laid, parse_scaffold_spec, write_raster, RasterFormat};
use brickwork::scaffold::{neurons_by_tag, Laid, Origin};
use brickwork::sim::{Simulation, SimulationConfig, SpikeRaster};
use clap::{Parser, Subcommand};

/// Compose spiking neural circuits from bricks and simulate them.
#[derive(Parser)]
#[command(name = "brickwork", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a scaffold spec (TOML) into a circuit document (JSON).
    Build {
        spec: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Simulate a circuit document and write its spike raster.
    Run {
        circuit: PathBuf,
        #[arg(long)]
        steps: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Raster destination; stdout when omitted.
        #[arg(long)]
        raster: Option<PathBuf>,
        #[arg(long, default_value = "events")]
        format: RasterFormat,
    },
    /// Neuron counts per brick and the depth report of a circuit document.
    Inspect { circuit: PathBuf },
    /// Build and run one of the bundled examples; lists them without a name.
    Demo {
        name: Option<String>,
        /// Override the demo's default step count.
        #[arg(long)]
        steps: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the compiled circuit document here.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        raster: Option<PathBuf>,
        #[arg(long, default_value = "events")]
        format: RasterFormat,
    },
}

enum Failure {
    Usage(String),
    Invalid(String),
    Simulation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Simulation(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Invalid(m) | Failure::Simulation(m) => m,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn compile(spec: &str, origin: &str) -> Result<Laid, Failure> {
    let scaffold = parse_scaffold_spec(spec).map_err(|e| Failure::Invalid(format!("{origin}: {e}")))?;
    scaffold.compile().map_err(|e| Failure::Invalid(format!("{origin}: {e}")))
}

fn simulate(circuit: &brickwork::Circuit, steps: u32, seed: u64) -> Result<SpikeRaster, Failure> {
    let sim = Simulation::new(circuit).map_err(|e| Failure::Invalid(e.to_string()))?;
    sim.run(&SimulationConfig::new(steps).with_seed(seed))
        .map_err(|e| Failure::Simulation(e.to_string()))
}

fn emit_raster(raster: &SpikeRaster, format: RasterFormat, dest: Option<&Path>) -> Result<(), Failure> {
    let text = write_raster(raster, format);
    match dest {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn inspect(text: &str) -> Result<String, Failure> {
    let (circuit, bricks) = decode_document(text).map_err(|e| Failure::Invalid(e.to_string()))?;
    let mut out = String::new();
    writeln!(out, "namespace {}", circuit.namespace()).unwrap();
    writeln!(out, "neurons   {}", circuit.neuron_count()).unwrap();
    writeln!(out, "synapses  {}", circuit.synapse_count()).unwrap();
    writeln!(out, "stimulus  {}", circuit.stimulus().count()).unwrap();
    let counts = neurons_by_tag(&circuit);
    if bricks.is_empty() {
        out.push_str("\nbrick               neurons\n");
        for (tag, n) in &counts {
            writeln!(out, "{tag:<19} {n:>7}").unwrap();
        }
        return Ok(out);
    }
    out.push_str("\nbrick               kind               origin    neurons  depth         total    begin\n");
    for b in &bricks {
        let origin = match b.origin {
            Origin::User => "user",
            Origin::Padding => "padding",
            Origin::Buffer => "buffer",
        };
        let begin = b.begin.map_or_else(|| "runtime".to_owned(), |t| t.to_string());
        let n = counts.get(b.tag.as_str()).copied().unwrap_or(0);
        writeln!(
            out,
            "{:<19} {:<18} {origin:<9} {n:>7}  {:<13} {:<8} {begin}",
            b.tag, b.kind, b.depth, b.total_depth
        )
        .unwrap();
    }
    if let Some(n) = counts.get("start") {
        writeln!(out, "{:<19} {:<18} {:<9} {n:>7}", "start", "-", "scaffold").unwrap();
    }
    Ok(out)
}

/// Human-readable account of which output lines fired when.
fn describe_outputs(laid: &Laid, raster: &SpikeRaster) -> String {
    let mut out = String::new();
    for b in laid.bricks().iter().filter(|b| b.origin == Origin::User) {
        for (port, neurons) in b.outputs.iter().enumerate() {
            let mut spikes: Vec<(u32, usize)> = neurons
                .iter()
                .enumerate()
                .flat_map(|(line, id)| raster.times(id).iter().map(move |&t| (t, line)))
                .collect();
            spikes.sort();
            let shown: Vec<String> = spikes.iter().take(24).map(|(t, line)| format!("{line}@{t}")).collect();
            let more = if spikes.len() > 24 { format!(" ... ({} total)", spikes.len()) } else { String::new() };
            let body = if shown.is_empty() { "-".to_owned() } else { shown.join(" ") };
            writeln!(out, "  {}.{port}: {body}{more}", b.name).unwrap();
        }
    }
    out
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Build { spec, output } => {
            let laid = compile(&read(&spec)?, &spec.display().to_string())?;
            log::info!("{} neurons, {} synapses", laid.circuit.neuron_count(), laid.circuit.synapse_count());
            write(&output, &encode_laid(&laid))
        }
        Command::Run { circuit, steps, seed, raster, format } => {
            let circuit = decode_circuit(&read(&circuit)?).map_err(|e| Failure::Invalid(e.to_string()))?;
            let spikes = simulate(&circuit, steps, seed)?;
            log::info!("{} spikes in {steps} steps", spikes.len());
            emit_raster(&spikes, format, raster.as_deref())
        }
        Command::Inspect { circuit } => {
            print!("{}", inspect(&read(&circuit)?)?);
            Ok(())
        }
        Command::Demo { name: None, .. } => {
            for d in DEMOS {
                println!("{}", d.name);
            }
            Ok(())
        }
        Command::Demo { name: Some(name), steps, seed, output, raster, format } => {
            let Some(d) = demo(&name) else {
                let names: Vec<&str> = DEMOS.iter().map(|d| d.name).collect();
                return Err(Failure::Usage(format!("unknown demo `{name}` (available: {})", names.join(", "))));
            };
            let laid = compile(d.spec, d.name)?;
            if let Some(path) = &output {
                write(path, &encode_laid(&laid))?;
            }
            let steps = steps.unwrap_or(d.steps);
            let spikes = simulate(&laid.circuit, steps, seed)?;
            println!(
                "demo {}: {} neurons, {} synapses, {steps} steps, seed {seed}",
                d.name,
                laid.circuit.neuron_count(),
                laid.circuit.synapse_count()
            );
            print!("{}", describe_outputs(&laid, &spikes));
            if let Some(path) = &raster {
                emit_raster(&spikes, format, Some(path))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
