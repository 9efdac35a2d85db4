//! Poincaré half-maps of planar linear systems on the section `x = 0`,
//! computed from their integral characterization, with series jets,
//! derivative and sign certificates, a closed-form flow oracle, and a
//! crossing-orbit search for two-zone piecewise linear systems.

pub mod error;
pub mod flow;
pub mod halfmap;
pub mod integral;
pub mod params;
pub mod pwl;
pub mod series;
pub mod solve;
pub mod sweep;

pub use error::{HalfMapError, Result};
pub use flow::{
    first_return, first_return_in, flow_at, oracle_half_map, orbit_sample, AffineFlow,
    FlowCrossing, OrbitSample, ReturnBudget, Side,
};
pub use halfmap::{
    bisector_position, derivative1, derivative2, domain_interval, half_map, half_map_inverse,
    DomainInfo, Endpoint, EndpointKind, HalfMap,
};
pub use integral::{antiderivative_h, c_constant, integral_value, Antiderivative, PvConstant};
pub use params::{eval_w, sign, LienardParams, QuadraticW, Root};
pub use pwl::{
    backward_map, corollary_certificates, displacement, find_crossing_orbits, forward_map,
    oracle_backward_map, oracle_circuit, Certificate, Classification, CommonInterval, Conclusion,
    CrossingOrbit, CrossingOrbitReport, PwlHalfMaps, PwlSystem, SearchConfig, SlidingSegment,
    Stability,
};
pub use series::{
    infinity_jet, puiseux_at_hat_y0, series_eval, series_invert, taylor_infinity, taylor_origin,
    taylor_origin_exact, taylor_origin_shifted, Anchor, InfinityInversionJet, PowerSeries, Term,
};
pub use solve::SolverConfig;
pub use sweep::Execution;
