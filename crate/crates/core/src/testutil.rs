use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelRealization;
use crate::linalg::{cn01_matrix, RVec};

/// Unit-scale random instance; `i` or `j` may be zero.
pub(crate) fn instance(m: usize, i: usize, j: usize, kappa: f64, beta: f64, seed: u64) -> ChannelRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ChannelRealization {
        h_ul: cn01_matrix(m, i, &mut rng),
        h_dl: cn01_matrix(m, j, &mut rng),
        h_si: cn01_matrix(m, m, &mut rng).scale(0.3),
        g_ue: cn01_matrix(i, j, &mut rng).scale(0.2),
        q_ul: RVec::from_fn(i, |k, _| 0.5 + k as f64 * 0.25),
        w_dl: cn01_matrix(m, j, &mut rng).scale(0.6),
        noise_var_bs: 0.1,
        noise_var_ue: 0.2,
        kappa,
        beta,
    }
}
