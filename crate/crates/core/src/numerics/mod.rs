//! Quadrature, image series and special functions.

pub mod bessel;
pub mod lambert;
pub mod quadrature;
pub mod series;
pub mod sine_sum;

pub use bessel::{bessel_half, half_order_i_scaled, half_order_j};
pub use lambert::lambert_w0;
pub use quadrature::{
    integrate_adaptive, integrate_panels, integrate_periodic_panels, laplace_transform, Integral,
    QuadratureSpec,
};
pub use series::{sum_images, sum_images_truncated, SeriesSpec, SeriesSum};
pub use sine_sum::{closed_sine_sum, sine_sum_window, sine_sum_window_even, window_index};
