//! Built-in two-class scenario grids and the random network-size study.
//!
//! Class 1 sources are heavy and short, class 2 sources light and long.

use aoi_core::{SimConfig, SourceParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{PolicyConfig, Scenario, Sweep, SweepParam};
use crate::error::{LabError, Result};

/// Seed of the random draws of [`fig6`].
pub const FIG6_SEED: u64 = 0x5EED_0006;

const DESK_HORIZON: u64 = 1_000_000;
const DESK_REPLICATIONS: usize = 5;

fn sim(horizon: u64) -> SimConfig {
    SimConfig { replications: DESK_REPLICATIONS, ..SimConfig::new(horizon, 2024) }
}

fn class(alpha: f64, p: f64, len: u32, count: usize) -> Vec<SourceParams> {
    vec![SourceParams::new(alpha, p, len).expect("built-in parameters are valid"); count]
}

fn scenario(id: String, params: Vec<SourceParams>, sweep: Option<Sweep>, horizon: u64) -> Scenario {
    Scenario { id, params, policies: PolicyConfig::standard_set(), sim: sim(horizon), sweep }
}

/// Channel reliabilities swept over `0.20, 0.25, ..., 1.00`.
pub fn fig3_p_values() -> Vec<f64> {
    (0..17).map(|k| (20 + 5 * k) as f64 / 100.0).collect()
}

/// `L* = 15, 20, ..., 100`.
pub fn fig4_l_values() -> Vec<u32> {
    (0..18).map(|k| 15 + 5 * k).collect()
}

/// `alpha* = 2, 4, ..., 20`.
pub fn fig5_alpha_values() -> Vec<f64> {
    (1..=10).map(|k| (2 * k) as f64).collect()
}

pub const FIG6_SIZES: [usize; 6] = [10, 20, 30, 50, 70, 100];

/// Varying channel reliability; five `(5, p, 2)` and five `(1, p, 50)` sources.
pub fn fig3_at(p: f64) -> Scenario {
    let mut params = class(5.0, p, 2, 5);
    params.extend(class(1.0, p, 50, 5));
    scenario(format!("fig3/p={p}"), params, Some(Sweep { param: SweepParam::P, value: p }), DESK_HORIZON)
}

/// Varying class-2 length; class-2 lengths are `L*-2 ..= L*+2`.
pub fn fig4_at(l_star: u32) -> Scenario {
    let mut params = class(5.0, 0.8, 2, 5);
    for len in l_star - 2..=l_star + 2 {
        params.extend(class(1.0, 0.4, len, 1));
    }
    let sweep = Sweep { param: SweepParam::Len, value: l_star as f64 };
    scenario(format!("fig4/L={l_star}"), params, Some(sweep), DESK_HORIZON)
}

/// Varying class-1 weight.
pub fn fig5_at(alpha: f64) -> Scenario {
    let mut params = class(alpha, 0.8, 2, 5);
    params.extend(class(1.0, 0.4, 50, 5));
    let sweep = Sweep { param: SweepParam::Alpha, value: alpha };
    scenario(format!("fig5/alpha={alpha}"), params, Some(sweep), DESK_HORIZON)
}

/// Random networks of increasing size. Each size draws its own sources from
/// a generator seeded with `FIG6_SEED + N`.
pub fn fig6_at(n: usize) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(FIG6_SEED.wrapping_add(n as u64));
    let params = (0..n)
        .map(|_| {
            let alpha = rng.gen_range(1.0..=10.0);
            let p = rng.gen_range(0.5..=1.0);
            let len = if rng.gen_bool(0.5) { rng.gen_range(2..=5) } else { rng.gen_range(20..=100) };
            SourceParams::new(alpha, p, len).expect("drawn parameters are valid")
        })
        .collect();
    let horizon = if n >= 100 { 2 * DESK_HORIZON } else { DESK_HORIZON };
    scenario(format!("fig6/N={n}"), params, None, horizon)
}

/// All instances of one figure's grid.
pub fn scenario_fig(n: u8) -> Result<Vec<Scenario>> {
    Ok(match n {
        3 => fig3_p_values().into_iter().map(fig3_at).collect(),
        4 => fig4_l_values().into_iter().map(fig4_at).collect(),
        5 => fig5_alpha_values().into_iter().map(fig5_at).collect(),
        6 => FIG6_SIZES.iter().map(|&n| fig6_at(n)).collect(),
        other => return Err(LabError::field("figure", format!("{other} is not one of 3, 4, 5, 6"))),
    })
}
