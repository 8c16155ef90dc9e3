use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fecarbon::catalog::OptTarget;
use fecarbon::embodied::DEFAULT_AREA_EFFICIENCY;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "fecarbon",
    version,
    about = "Life-cycle carbon of FeFET and SRAM embedded memories"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// CMOS fab baseline file (default: packaged 28 nm baseline).
    #[arg(long, global = true)]
    pub fab: Option<PathBuf>,
    /// Process-gas emission model file.
    #[arg(long, global = true)]
    pub ghg: Option<PathBuf>,
    /// ALD process recipe file (default: packaged calibrated recipe).
    #[arg(long, global = true)]
    pub recipe: Option<PathBuf>,
    /// Device table file.
    #[arg(long = "devices-file", global = true)]
    pub devices_file: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Seed for Monte Carlo sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Command {
    /// FE-layer energy per area, optionally with Monte Carlo uncertainty.
    Epa(EpaArgs),
    /// Carbon per area breakdown of a device or the CMOS baseline.
    Cpa(CpaArgs),
    /// Embodied carbon of devices across capacities.
    Compare(CompareArgs),
    /// Endurance-limited lifetime and total footprint.
    Lifetime(LifetimeArgs),
    /// Accelerator-level embodied and per-inference operational carbon.
    System(SystemArgs),
    /// Scale recipe tool powers to hit a target FE-layer EPA.
    Calibrate(CalibrateArgs),
    /// Re-run a command from the inputs echoed in a JSON report.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Epa(_) => "epa",
            Command::Cpa(_) => "cpa",
            Command::Compare(_) => "compare",
            Command::Lifetime(_) => "lifetime",
            Command::System(_) => "system",
            Command::Calibrate(_) => "calibrate",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EpaArgs {
    #[arg(long, default_value = "Recipe")]
    pub device: String,
    #[arg(long, default_value_t = 0)]
    pub mc_samples: usize,
    /// Area efficiency used for the FE share of total FeFET EPA.
    #[arg(long, default_value_t = DEFAULT_AREA_EFFICIENCY)]
    pub ae: f64,
    /// CSV file for the Monte Carlo samples.
    #[arg(long)]
    pub samples_out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CpaArgs {
    /// Device name; omit for the CMOS baseline.
    #[arg(long)]
    pub device: Option<String>,
    #[arg(long, default_value_t = DEFAULT_AREA_EFFICIENCY)]
    pub ae: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CompareArgs {
    #[arg(long, value_delimiter = ',', default_value = "SRAM,HZO5")]
    pub devices: Vec<String>,
    /// Capacities in MB (2^20 bytes).
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32")]
    pub capacities: Vec<f64>,
    #[arg(long, default_value = "Area")]
    pub target: OptTarget,
    /// Area efficiency for the first-order area model.
    #[arg(long, default_value_t = DEFAULT_AREA_EFFICIENCY)]
    pub ae: f64,
    /// Design-point catalog; when given, areas and AE come from target-optimal records.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LifetimeArgs {
    #[arg(long)]
    pub device: String,
    /// Capacity in MB (2^20 bytes).
    #[arg(long)]
    pub capacity: f64,
    /// Writes per day.
    #[arg(long)]
    pub write_rate: f64,
    /// Bits per write.
    #[arg(long, default_value_t = 64)]
    pub width: u64,
    /// Override the device's rated endurance (cycles).
    #[arg(long)]
    pub endurance: Option<f64>,
    /// Deployment time for the total footprint, days.
    #[arg(long)]
    pub runtime_days: Option<f64>,
    /// Operational carbon over the runtime, kg CO2e.
    #[arg(long, default_value_t = 0.0)]
    pub ocf_kg: f64,
    #[arg(long, default_value_t = DEFAULT_AREA_EFFICIENCY)]
    pub ae: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SystemArgs {
    /// Accelerator config (default: packaged edge accelerator).
    #[arg(long)]
    pub accelerator: Option<PathBuf>,
    /// Workload summary (default: packaged MobileNet V1 summary).
    #[arg(long)]
    pub workload: Option<PathBuf>,
    /// Design-point catalog (default: packaged edge catalog).
    #[arg(long)]
    pub catalog: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CalibrateArgs {
    /// Target FE-layer EPA, kWh/cm².
    #[arg(long, default_value_t = 0.26)]
    pub target_epa: f64,
    #[arg(long, default_value_t = 20.0)]
    pub hzo: f64,
    #[arg(long, default_value_t = 3.0)]
    pub al2o3: f64,
    /// Write the calibrated recipe file here.
    #[arg(long)]
    pub recipe_out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// JSON report produced with --format json.
    pub report: PathBuf,
}
