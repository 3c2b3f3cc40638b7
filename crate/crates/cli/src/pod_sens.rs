use std::path::{Path, PathBuf};

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use dsvd::pod::{self, SnapshotFormat};
use dsvd::verify::{matched_digits, DEFAULT_EPS};
use dsvd::{Error, Result};

use crate::{emit, Status};

#[derive(Args, Debug)]
pub struct PodArgs {
    /// Snapshot file (binary SNAP1 or CSV).
    #[arg(long)]
    matrix: PathBuf,
    /// Overrides the format implied by the file extension.
    #[arg(long)]
    format: Option<SnapshotFormat>,
    /// Comma-separated 1-based mode indices.
    #[arg(long, value_delimiter = ',', required = true)]
    modes: Vec<usize>,
    /// Differentiate with respect to the raw snapshots instead of the centred ones.
    #[arg(long)]
    chain_centering: bool,
    /// Spot-check each field against finite differences.
    #[arg(long)]
    check: bool,
    #[arg(long, default_value_t = 25)]
    samples: usize,
    /// Relative step; the absolute step is `eps · max|X'|`.
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    threshold: u32,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Sidecar path, `<out-dir>/pod_sens.json` by default.
    #[arg(long)]
    json_out: Option<PathBuf>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn run(args: &PodArgs) -> Result<Status> {
    let format = args
        .format
        .unwrap_or_else(|| SnapshotFormat::from_path(&args.matrix));
    let mut x = pod::load_snapshots(&args.matrix, format)?;
    x.center_in_place();
    let k = args.modes.iter().copied().max().unwrap_or(0);
    if let Some(&bad) = args.modes.iter().find(|&&i| i == 0) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            available: x.snapshots(),
        });
    }
    let r = pod::method_of_snapshots(&x, k)?;
    let energies = r.energy_fractions();
    std::fs::create_dir_all(&args.out_dir).map_err(io_err(&args.out_dir))?;

    let step = args.eps * x.max_abs();
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut min_digits: Option<u32> = None;
    let mut modes = Vec::new();
    for &i in &args.modes {
        let field = pod::sigma_sensitivity_field(&r, i, args.chain_centering)?;
        let file = format!("mode_{i}.bin");
        let path = args.out_dir.join(&file);
        pod::save_matrix(&path, &field, SnapshotFormat::Bin)?;
        let mut entry = serde_json::Map::new();
        entry.insert("index".into(), json!(i));
        entry.insert("sigma".into(), json!(r.sigmas[i - 1]));
        entry.insert("energy".into(), json!(energies[i - 1]));
        entry.insert("file".into(), json!(file));
        if args.check {
            let mut checks = Vec::new();
            let mut worst = dsvd::verify::MAX_DIGITS;
            for _ in 0..args.samples {
                let p = rng.gen_range(0..x.states());
                let q = rng.gen_range(0..x.snapshots());
                let fd = pod::fd_sigma_probe(&x, &r, i, (p, q), step, args.chain_centering)?;
                let an = field[(p, q)];
                let digits = matched_digits(an, fd);
                worst = worst.min(digits);
                checks.push(
                    json!({ "i": p + 1, "j": q + 1, "analytic": an, "fd": fd, "digits": digits }),
                );
            }
            eprintln!(
                "mode {i}: sigma {:.6e}, spot-check min_digits {worst}",
                r.sigmas[i - 1]
            );
            min_digits = Some(min_digits.map_or(worst, |m| m.min(worst)));
            entry.insert(
                "check".into(),
                json!({ "min_digits": worst, "entries": checks }),
            );
        }
        modes.push(Value::Object(entry));
    }
    let pass = min_digits.is_none_or(|d| d >= args.threshold);
    let out = json!({
        "m": x.states(),
        "n": x.snapshots(),
        "chain_centering": args.chain_centering,
        "step": step,
        "seed": args.seed,
        "modes": modes,
        "min_digits": min_digits,
        "pass": pass,
    });
    let sidecar = args
        .json_out
        .clone()
        .unwrap_or_else(|| args.out_dir.join("pod_sens.json"));
    emit(&out, Some(&sidecar))?;
    Ok(if pass {
        Status::Pass
    } else {
        Status::BelowThreshold
    })
}
