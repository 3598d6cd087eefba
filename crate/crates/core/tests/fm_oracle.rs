use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crn_msa::linalg::fourier_motzkin_feasible;

#[path = "common/fm_grid.rs"]
mod fm_grid;
use fm_grid::{grid_witness, random_system};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn agrees_with_grid_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (sys, planted) = random_system(&mut rng);
        let fm = fourier_motzkin_feasible(&sys).unwrap();
        if let Some(x) = fm.sample() {
            prop_assert!(sys.is_satisfied(x));
        }
        if let Some(p) = planted {
            prop_assert!(sys.is_satisfied(&p));
            prop_assert!(fm.is_sat());
        }
        if let Some(x) = grid_witness(&mut rng, &sys) {
            prop_assert!(sys.is_satisfied(&x));
            prop_assert!(fm.is_sat());
        }
    }
}
