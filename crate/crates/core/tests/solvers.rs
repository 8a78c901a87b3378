mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use skypath::baseline::run_direct;
use skypath::dp::{greedy_rollout, value_iteration, value_iteration_traced, RolloutOptions, DEFAULT_TOLERANCE};
use skypath::experiment::{Environment, ExperimentConfig, MAX_SWEEPS};
use skypath::mdp::GridMdp;
use skypath::radio::CachedProbe;
use skypath::td::{greedy_episode, learning_rate, train, TdConfig, TrainStats};
use skypath::tile::{train_tile, TileOptions, TilingSpec};

use common::{brute_force_cost, random_instance, HoleMap};

#[test]
fn oracle_on_hand_built_wall() {
    // 5x5 lattice, wall of holes along x = 2 except at the top row.
    let mut map = HoleMap {
        n: 5,
        step: 10.0,
        holes: vec![false; 25],
    };
    for j in 0..4 {
        map.holes[j * 5 + 2] = true;
    }
    // Through the wall: 4 steps, one leaving a hole. Around it: 4 + 2 * 4 = 12 steps.
    assert_eq!(brute_force_cost(&map, 30, (0, 0), (4, 0), 32), Some(12));
    assert_eq!(brute_force_cost(&map, 5, (0, 0), (4, 0), 32), Some(9));
    assert_eq!(brute_force_cost(&map, 30, (0, 0), (4, 0), 8), Some(34));
    assert_eq!(brute_force_cost(&map, 30, (0, 0), (4, 0), 3), None);
}

#[test]
fn value_iteration_matches_enumeration_on_10x10() {
    for seed in 0..20u64 {
        let (map, mdp, start, goal) = random_instance(10, 0.25, 30.0, 500 + seed);
        let best = brute_force_cost(&map, 30, start, goal, 40).expect("reachable");
        let v = value_iteration(&mdp, &map, DEFAULT_TOLERANCE, MAX_SWEEPS).unwrap();
        assert_eq!(v.get(mdp.start()), -(best as f64), "seed {seed}");
    }
}

#[test]
fn residuals_never_increase() {
    for seed in 0..20u64 {
        let (map, mdp, _, _) = random_instance(20, 0.3, 30.0, seed);
        let (_, residuals) = value_iteration_traced(&mdp, &map, DEFAULT_TOLERANCE, MAX_SWEEPS).unwrap();
        assert!(residuals.windows(2).all(|w| w[1] <= w[0]), "seed {seed}: {residuals:?}");
    }
}

fn learner_returns(mdp: &GridMdp, map: &HoleMap, cfg: &TdConfig) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let alpha = learning_rate(cfg.max_episodes + 1, cfg.n_alpha);
    let (mut table, _) = train(mdp, map, cfg).unwrap();
    let td = greedy_episode(
        &mut table,
        mdp,
        map,
        alpha,
        RolloutOptions::new(cfg.max_steps),
        &mut rng,
    );
    let spec = TilingSpec::new(*mdp.area(), 4, 40.0, 40.0).unwrap();
    let (frozen, _) = train_tile(mdp, map, cfg, spec, &TileOptions::default()).unwrap();
    let options = RolloutOptions {
        max_steps: cfg.max_steps,
        exclude_backtrack: true,
    };
    let tile = greedy_rollout(&frozen, mdp, map, options, &mut rng);
    (td.total_return, tile.total_return)
}

#[test]
fn dp_dominates_every_other_planner() {
    let cfg = TdConfig {
        max_episodes: 300,
        max_steps: 400,
        n_alpha: 100.0,
        n_eps: 30.0,
        rng_seed: 9,
    };
    for seed in 0..5u64 {
        let (map, mdp, _, _) = random_instance(20, 0.2, 30.0, 40 + seed);
        let v = value_iteration(&mdp, &map, DEFAULT_TOLERANCE, MAX_SWEEPS).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dp = greedy_rollout(&v, &mdp, &map, RolloutOptions::new(400), &mut rng).total_return;
        assert_eq!(dp, v.get(mdp.start()));
        let direct = run_direct(&mdp, &map, 400).total_return;
        let (td, tile) = learner_returns(&mdp, &map, &cfg);
        assert!(
            dp >= direct && dp >= td && dp >= tile,
            "seed {seed}: dp {dp} direct {direct} td {td} tile {tile}"
        );
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn improves(stats: &TrainStats) -> (f64, f64) {
    let n = stats.returns.len();
    (median(&stats.returns[..500]), median(&stats.returns[n - 500..]))
}

#[test]
fn full_scale_training_improves() {
    let cfg = ExperimentConfig::default();
    let env = Environment::generate(&cfg).unwrap();
    let mdp = cfg.mdp().unwrap();
    let probe = CachedProbe::new(&env.env);
    let td = cfg.td_config();
    let (_, table_stats) = train(&mdp, &probe, &td).unwrap();
    let (first, last) = improves(&table_stats);
    assert!(last >= first, "table: first {first} last {last}");
    let (_, tile_stats) = train_tile(&mdp, &probe, &td, cfg.tiling().unwrap(), &TileOptions::default()).unwrap();
    let (first, last) = improves(&tile_stats);
    assert!(last >= first, "tiles: first {first} last {last}");
    assert_eq!(table_stats.episodes(), 6000);
    assert_eq!(tile_stats.episodes(), 6000);
}
