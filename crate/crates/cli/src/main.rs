mod commands;
mod verify;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "exotic", version, about = "Exotic aromatic forests, S-series and stochastic order conditions")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Worker threads for parallel library code (default: all cores).
    #[arg(long, env = "EXOTIC_THREADS", global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Latex,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct MethodArgs {
    /// Built-in method: em, implicit-euler, lm, lm-post or exact.
    #[arg(long, default_value = "em", conflicts_with = "tableau")]
    pub method: String,
    /// Tableau file: {"a": [[..]], "b": [..], "d": [..], "d0": ..}.
    #[arg(long)]
    pub tableau: Option<std::path::PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct TorusArgs {
    /// Potential V with f = −∇V, in variables x (or x1, x2, ...).
    #[arg(long, default_value = "sin(x) + 1/4*cos(2*x)")]
    pub potential: String,
    /// Test function φ.
    #[arg(long, default_value = "sin(x) + cos(2*x)")]
    pub phi: String,
    /// Dimension of the torus.
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List exotic aromatic forests up to an order.
    Enumerate {
        #[arg(long)]
        order: usize,
        /// all, eat, trees, plain-trees, aromas, connected or no-aromas.
        #[arg(long, default_value = "all")]
        filter: String,
    },
    /// Symmetry coefficient σ(π).
    Sigma {
        #[arg(long)]
        forest: String,
    },
    /// Canonical form and gradings of a forest.
    Parse {
        #[arg(long)]
        forest: String,
    },
    /// Coproduct, coaction or clumping map Φ* of a forest.
    Coproduct {
        /// bck, cem, cem-reduced, deshuffle, deshuffle-aroma-linear or phi-star.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        forest: String,
        /// Target decorations for a decorated cem coaction, e.g. "b,w".
        #[arg(long)]
        decorations: Option<String>,
    },
    /// Composition a₁ ∗ a₂ of two methods (first applied first).
    Compose {
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
        /// Step fraction of the first method.
        #[arg(long, default_value = "1")]
        first_step: String,
        /// Step fraction of the second method.
        #[arg(long, default_value = "1")]
        second_step: String,
        #[arg(long, default_value_t = 3)]
        order: usize,
    },
    /// Substitution b_c ⋆ a of a modified field into a method.
    Substitute {
        /// F-weighted tree series for the field ("c*forest; ..." or @file.json); default •.
        #[arg(long, allow_hyphen_values = true)]
        field: Option<String>,
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long, default_value_t = 3)]
        order: usize,
    },
    /// Exact flow character e = exp∗(l).
    ExactFlow {
        #[arg(long, default_value_t = 3)]
        order: usize,
    },
    /// Character of a stochastic Runge-Kutta method.
    SrkCharacter {
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long, default_value_t = 3)]
        order: usize,
    },
    /// Weak or invariant-measure order conditions, or a method's report.
    OrderConditions {
        /// weak or invariant.
        #[arg(long, default_value = "weak")]
        kind: String,
        #[arg(long)]
        order: usize,
        /// Method to check; without it the conditions are listed.
        #[arg(long)]
        method: Option<String>,
        #[arg(long, conflicts_with = "method")]
        tableau: Option<std::path::PathBuf>,
    },
    /// Integration by parts: one step, or a normal form.
    Ibp {
        /// Forest to rewrite.
        #[arg(long, conflicts_with = "series")]
        forest: Option<String>,
        /// F-weighted series ("c*forest; ..." or @file.json).
        #[arg(long, allow_hyphen_values = true)]
        series: Option<String>,
        /// Root vertex to eliminate (canonical vertex index).
        #[arg(long)]
        root: Option<usize>,
        /// Root elimination to single-root terms.
        #[arg(long)]
        normalize: bool,
        /// Root elimination followed by gradient reduction (the map A).
        #[arg(long)]
        gradient: bool,
    },
    /// Modified field for the invariant measure (backward error analysis).
    Bea {
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long, default_value_t = 3)]
        order: usize,
        /// Use the fixed-point recursion instead of the closed series.
        #[arg(long)]
        recursion: bool,
    },
    /// Modified equation b with b_c ⋆ a ∼ δ_𝟏.
    ModifiedEq {
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long)]
        recursion: bool,
    },
    /// Postprocessor condition a − δ_𝟏 + [l, ā] ∼ 0.
    PostprocessorCheck {
        #[command(flatten)]
        method: MethodArgs,
        /// Postprocessor method (built-in name or tableau file).
        #[arg(long)]
        post: String,
        #[arg(long)]
        order: usize,
    },
    /// ∫ F(S)[φ] ρ∞ on the torus by the trapezoid rule.
    Quadrature {
        #[arg(long, conflicts_with = "series")]
        forest: Option<String>,
        /// F-weighted series ("c*forest; ..." or @file.json).
        #[arg(long, allow_hyphen_values = true)]
        series: Option<String>,
        #[command(flatten)]
        torus: TorusArgs,
        #[arg(long, default_value_t = 2048)]
        grid: usize,
        /// Also print each term's integral.
        #[arg(long)]
        per_term: bool,
    },
    /// Monte Carlo ergodic average of φ.
    Simulate {
        #[command(flatten)]
        method: MethodArgs,
        #[command(flatten)]
        torus: TorusArgs,
        /// Integrate the modified equation of this order, which corrects the
        /// method's invariant measure to that order.
        #[arg(long)]
        modified_order: Option<usize>,
        #[arg(long)]
        h: String,
        /// Steps averaged per trajectory.
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
        #[arg(long, default_value_t = 1)]
        trajectories: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Quadrature points per axis for the reference value.
        #[arg(long, default_value_t = 2048)]
        grid: usize,
    },
    /// Run a verification suite; exits with 1 on failure.
    Verify {
        /// hopf, ibp, laws or paper-tables.
        #[arg(long)]
        suite: String,
    },
}

pub struct Output {
    pub text: String,
    pub failed: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::execute(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
