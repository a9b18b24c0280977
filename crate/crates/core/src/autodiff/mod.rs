//! Hand-derived reverse-mode gradients, Adam, and training.
//!
//! Complex parameters are optimized as independent real and imaginary
//! coordinates. For a real loss `L` and complex `z = x + iy`, the gradient is
//! stored as `∂L/∂x + i ∂L/∂y`, so `dL = Re⟨g, dz⟩`. In this convention
//!
//! * `p = ⟨v|P|v⟩` gives `g_v = 2 P v`;
//! * `p = ⟨s|Q(QᴴQ)⁻¹Qᴴ|s⟩` gives `g_Q = 2 (s − Q c) cᴴ` with `c = (QᴴQ)⁻¹Qᴴs`;
//! * `t = z/‖z‖` gives `g_z = (g_t − Re⟨t, g_t⟩ t) / ‖z‖`.

mod adam;
mod backward;
mod gradcheck;
mod loss;
mod params;
mod train;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use backward::{backward, backward_with, batch_loss};
pub use gradcheck::{finite_diff_check, finite_diff_check_against, finite_diff_check_groups};
pub use loss::{bce_grad, bce_loss, PROB_CLAMP};
pub use params::{GradientSet, ParamGroup, ParameterSet};
pub use train::{train, train_model, EpochRecord, TrainConfig, TrainOutcome};
