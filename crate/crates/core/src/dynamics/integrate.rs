use super::{DynamicsError, DynamicsParams, PedestrianControlState, VehicleControlState};
use crate::math::{wrap_angle, Vec2};

/// Tolerance on the steering limit when validating commands.
const PHI_SLACK: f64 = 1e-9;

/// Holds `(v_cmd, phi_cmd)` for `dt` seconds and integrates the rear-axle
/// simple-car model with `substeps` RK4 steps.
pub fn integrate_vehicle(
    s: VehicleControlState,
    params: &DynamicsParams,
    v_cmd: f64,
    phi_cmd: f64,
    dt: f64,
    substeps: usize,
) -> Result<VehicleControlState, DynamicsError> {
    vehicle_rollout(s, params, v_cmd, phi_cmd, dt, substeps, |_, _| {})
}

/// Same as [`integrate_vehicle`], calling `visit(k, state)` after each substep
/// `k = 1..=substeps`. The returned state is the one passed for `k = substeps`.
pub fn vehicle_rollout(
    s: VehicleControlState,
    params: &DynamicsParams,
    v_cmd: f64,
    phi_cmd: f64,
    dt: f64,
    substeps: usize,
    mut visit: impl FnMut(usize, &VehicleControlState),
) -> Result<VehicleControlState, DynamicsError> {
    if !(dt.is_finite() && dt > 0.0) || substeps == 0 {
        return Err(DynamicsError::InvalidStep);
    }
    if !(v_cmd.is_finite() && v_cmd >= 0.0) {
        return Err(DynamicsError::InvalidControl(format!(
            "speed {v_cmd} must be finite and non-negative"
        )));
    }
    if !phi_cmd.is_finite() || phi_cmd.abs() > params.phi_max + PHI_SLACK {
        return Err(DynamicsError::InvalidControl(format!(
            "steering {phi_cmd} exceeds limit {}",
            params.phi_max
        )));
    }

    let wheelbase = params.wheelbase;
    let yaw_rate = v_cmd * phi_cmd.tan() / wheelbase;
    let u_t = throttle_effort(s.v, v_cmd, dt, params);
    let u_phi = (phi_cmd / params.phi_max).clamp(-1.0, 1.0);

    let h = dt / substeps as f64;
    let mut pos = s.p_r;
    let mut theta = s.theta;
    let mut out = s;
    for k in 1..=substeps {
        (pos, theta) = rk4_step(pos, theta, v_cmd, yaw_rate, h);
        out = VehicleControlState {
            v: v_cmd,
            phi: phi_cmd,
            theta,
            p_f: pos + Vec2::from_angle(theta) * wheelbase,
            p_r: pos,
            u_t,
            u_phi,
        };
        visit(k, &out);
    }
    Ok(out)
}

fn rk4_step(pos: Vec2, theta: f64, v: f64, yaw_rate: f64, h: f64) -> (Vec2, f64) {
    let vel = |th: f64| Vec2::from_angle(th) * v;
    let k1 = vel(theta);
    let k2 = vel(theta + 0.5 * h * yaw_rate);
    let k3 = k2;
    let k4 = vel(theta + h * yaw_rate);
    let pos = pos + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    (pos, theta + h * yaw_rate)
}

/// Normalised throttle (positive) or brake (negative) effort needed to move
/// from `v` to `v_cmd` within `dt`.
fn throttle_effort(v: f64, v_cmd: f64, dt: f64, params: &DynamicsParams) -> f64 {
    let dv = v_cmd - v;
    let limit = if dv >= 0.0 { params.a_throttle } else { params.a_brake };
    (dv / (limit * dt)).clamp(-1.0, 1.0)
}

/// Pedestrians turn instantly and walk straight along the new orientation.
pub fn integrate_pedestrian(s: PedestrianControlState, v_cmd: f64, theta_cmd: f64, dt: f64) -> PedestrianControlState {
    PedestrianControlState {
        v: v_cmd,
        theta: wrap_angle(theta_cmd),
        p: s.p + Vec2::from_angle(theta_cmd) * (v_cmd * dt),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::AgentType;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn unit_car() -> DynamicsParams {
        DynamicsParams {
            wheelbase: 1.0,
            phi_max: 0.9,
            ..DynamicsParams::defaults(AgentType::Car)
        }
    }

    fn at_origin(params: &DynamicsParams) -> VehicleControlState {
        VehicleControlState::from_front(Vec2::new(params.wheelbase, 0.0), 0.0, 0.0, 0.0, params.wheelbase)
    }

    #[test]
    fn straight_line() {
        let p = unit_car();
        let s = integrate_vehicle(at_origin(&p), &p, 1.0, 0.0, 1.0, 5).unwrap();
        assert!((s.p_r - Vec2::new(1.0, 0.0)).length() < 1e-12);
        assert_eq!(s.theta, 0.0);
    }

    #[test]
    fn zero_speed_holds_position() {
        let p = unit_car();
        let s0 = at_origin(&p);
        let s = integrate_vehicle(s0, &p, 0.0, 0.5, 1.0, 5).unwrap();
        assert_eq!((s.p_r, s.p_f, s.theta), (s0.p_r, s0.p_f, s0.theta));
    }

    #[test]
    fn quarter_arc_matches_closed_form() {
        // r = L / tan(π/4) = 1, centre at (0, 1); after π/2 s the rear axle is at (1, 1).
        let p = unit_car();
        let s = integrate_vehicle(at_origin(&p), &p, 1.0, FRAC_PI_4, FRAC_PI_2, 20).unwrap();
        assert!((s.p_r - Vec2::new(1.0, 1.0)).length() < 1e-4, "{:?}", s.p_r);
        assert!((s.theta - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn steering_beyond_limit_is_rejected() {
        let p = unit_car();
        let err = integrate_vehicle(at_origin(&p), &p, 1.0, 1.0, 0.1, 5);
        assert!(matches!(err, Err(DynamicsError::InvalidControl(_))));
        assert!(matches!(
            integrate_vehicle(at_origin(&p), &p, 1.0, 0.0, 0.0, 5),
            Err(DynamicsError::InvalidStep)
        ));
    }

    #[test]
    fn efforts_are_normalised() {
        let p = unit_car();
        let s = integrate_vehicle(at_origin(&p), &p, 100.0, -0.9, 0.1, 1).unwrap();
        assert_eq!((s.u_t, s.u_phi), (1.0, -1.0));
    }

    #[test]
    fn rollout_visits_every_substep_and_ends_on_result() {
        let p = unit_car();
        let mut seen = Vec::new();
        let end = vehicle_rollout(at_origin(&p), &p, 2.0, 0.3, 0.2, 4, |k, s| seen.push((k, *s))).unwrap();
        assert_eq!(seen.iter().map(|x| x.0).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        assert_eq!(seen[3].1, end);
    }

    #[test]
    fn pedestrian_steps() {
        let s = PedestrianControlState {
            v: 0.0,
            theta: 0.0,
            p: Vec2::new(1.0, 2.0),
        };
        let still = integrate_pedestrian(s, 0.0, 2.0, 1.0);
        assert_eq!((still.p, still.theta), (s.p, 2.0));

        let up = integrate_pedestrian(s, 1.5, FRAC_PI_2, 2.0);
        assert!((up.p - Vec2::new(1.0, 5.0)).length() < 1e-12);

        let back = integrate_pedestrian(up, 1.5, -FRAC_PI_2, 2.0);
        assert!((back.p - s.p).length() < 1e-12);
        assert!((integrate_pedestrian(s, 1.0, 3.0 * PI, 1.0).theta - PI).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn arc_consistency(
            phi in prop_oneof![-0.85f64..-0.05, 0.05f64..0.85],
            v in 0.1f64..8.0,
            theta0 in -PI..PI,
            substeps in 20usize..60,
        ) {
            let p = unit_car();
            let s0 = VehicleControlState::from_front(
                Vec2::new(3.0, -2.0), theta0, 0.0, 0.0, p.wheelbase);
            let s = integrate_vehicle(s0, &p, v, phi, 1.0, substeps).unwrap();
            let r = p.wheelbase / phi.tan();
            let centre = s0.p_r + Vec2::from_angle(theta0).perp() * r;
            let theta1 = theta0 + v * phi.tan() / p.wheelbase;
            let expect = centre - Vec2::from_angle(theta1).perp() * r;
            prop_assert!((s.p_r - expect).length() < 1e-4);
        }

        #[test]
        fn axle_distance_stays_fixed(
            controls in prop::collection::vec((0.0f64..10.0, -0.9f64..0.9), 1000),
        ) {
            let p = unit_car();
            let mut s = at_origin(&p);
            for (v, phi) in controls {
                s = integrate_vehicle(s, &p, v, phi, 0.2, 5).unwrap();
            }
            prop_assert!((s.p_f.distance(s.p_r) - p.wheelbase).abs() < 1e-6);
        }
    }
}
