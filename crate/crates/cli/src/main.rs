use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hcprop::circuit::CircuitModel;
use hcprop::halfcheck::{parse_props, PropKind, DEFAULT_CBP_THRESHOLD, DEFAULT_NCL_NODE_CAP};
use hcprop::harness::{
    cmd_filter_experiment, cmd_solve, hc_oracle_suite, oracle_for, FilterConfig, OracleConfig,
    SolveConfig,
};
use hcprop::kernel::{Strategy, DEFAULT_LUBY_SCALE};
use log::error;

#[derive(Parser)]
#[command(
    name = "hcprop",
    version,
    about = "Euclidean TSP solving with half-checking propagators"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve a TSPLIB instance with a portfolio of search assets.
    Solve {
        file: PathBuf,
        /// Comma separated half-checking propagators (ncl, wncl, cbp, onetree, fail) or `none`.
        #[arg(long, default_value = "none")]
        props: String,
        /// Number of complete assets on the standard model.
        #[arg(long, default_value_t = 1)]
        assets: usize,
        /// combined, multi or roundrobin.
        #[arg(long, default_value = "combined")]
        strategy: Strategy,
        #[arg(long, value_name = "SECONDS")]
        time_limit: Option<f64>,
        #[arg(long)]
        node_limit: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Let incomplete assets share their no-goods.
        #[arg(long)]
        record_nogoods_incomplete: bool,
        #[arg(long, default_value_t = hcprop::branching::DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        start_node: usize,
        #[arg(long, default_value_t = DEFAULT_LUBY_SCALE)]
        luby_scale: u64,
        /// Run assets on threads instead of interleaving them.
        #[arg(long)]
        parallel: bool,
        #[arg(long, default_value_t = DEFAULT_NCL_NODE_CAP)]
        ncl_node_cap: usize,
        #[arg(long, default_value_t = DEFAULT_CBP_THRESHOLD)]
        cbp_threshold: f64,
    },
    /// Compare domain and cost filtering after a partial Warnsdorff path.
    FilterExp {
        file: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        assign_frac: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        start_node: usize,
    },
    /// Randomized check that accepted full assignments are tours.
    Oracle {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        min_n: usize,
        #[arg(long, default_value_t = 10)]
        max_n: usize,
    },
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).unwrap());
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.cmd {
        Cmd::Solve {
            file,
            props,
            assets,
            strategy,
            time_limit,
            node_limit,
            seed,
            record_nogoods_incomplete,
            epsilon,
            start_node,
            luby_scale,
            parallel,
            ncl_node_cap,
            cbp_threshold,
        } => {
            let cfg = SolveConfig {
                props: parse_props(&props).map_err(|e| e.to_string())?,
                complete_assets: assets,
                strategy,
                time_limit_s: time_limit,
                node_limit,
                seed,
                record_nogoods_incomplete,
                epsilon,
                start_node,
                luby_scale,
                parallel,
                ncl_node_cap,
                cbp_threshold,
            };
            let report = cmd_solve(&file, &cfg).map_err(|e| e.to_string())?;
            print_json(&serde_json::to_value(&report).expect("reports serialize"));
            Ok(report.exit_code() as u8)
        }
        Cmd::FilterExp {
            file,
            assign_frac,
            seed,
            start_node,
        } => {
            if !(0.0..=1.0).contains(&assign_frac) {
                return Err(format!("assign fraction {assign_frac} is outside [0, 1]"));
            }
            let cfg = FilterConfig {
                assign_frac,
                seed,
                start_node,
            };
            let res = cmd_filter_experiment(&file, &cfg).map_err(|e| e.to_string())?;
            print_json(&serde_json::to_value(&res).expect("reports serialize"));
            Ok(0)
        }
        Cmd::Oracle {
            trials,
            seed,
            min_n,
            max_n,
        } => {
            if min_n < 3 || min_n > max_n {
                return Err(format!("bad size range {min_n}..={max_n}"));
            }
            let cfg = OracleConfig {
                trials,
                min_n,
                max_n,
                seed,
            };
            let mut reports: Vec<_> = [
                PropKind::Ncl,
                PropKind::Wncl,
                PropKind::Cbp,
                PropKind::OneTree,
            ]
            .into_iter()
            .map(|k| oracle_for(k, &cfg))
            .collect();
            reports.push(hc_oracle_suite(
                "standard",
                &|m: &CircuitModel, _| m.standard_propagators(),
                &cfg,
            ));
            reports.push(oracle_for(PropKind::Fail, &cfg));
            let ok = reports.iter().all(|r| r.passed());
            print_json(&serde_json::to_value(&reports).expect("reports serialize"));
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            error!("{msg}");
            eprintln!("hcprop: {msg}");
            ExitCode::from(2)
        }
    }
}
