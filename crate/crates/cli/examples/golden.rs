//! Regenerates the golden avoided-crossing dataset in `data/`:
//! `cargo run -p cqedlab --example golden > crates/cli/data/rabi_branches.csv`

use cqedlab_core::config::SimConfig;
use cqedlab_core::fit::extract_branch_splittings;
use cqedlab_core::io::write_branches;
use cqedlab_core::synth::flux_map;
use cqedlab_core::Frequency;

fn main() -> cqedlab_core::Result<()> {
    let cfg = SimConfig::from_json(include_str!("../data/device1_cd2_flux_map.json"))?;
    let map = flux_map(&cfg.device, &cfg.grids.require("phi")?, &cfg.grids.require("freq_hz")?, &cfg.drive)?;
    let branches = extract_branch_splittings(&map, &cfg.device.qubits[0], Frequency::mhz(20.0))?;
    print!("{}", write_branches(&branches));
    Ok(())
}
