#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;

use autorvo::agent::{AgentState, AgentType, Obstacle};
use autorvo::dynamics::DynamicsParams;
use autorvo::geometry::{shapes_overlap, CtmatShape, Disk};
use autorvo::math::Vec2;
use proptest::prelude::*;

pub fn body(t: AgentType) -> CtmatShape {
    let disks: Vec<[f64; 3]> = match t {
        AgentType::Car => vec![[-1.4, 0.0, 0.9], [0.0, 0.0, 0.9], [1.4, 0.0, 0.9]],
        AgentType::Tricycle => vec![[-0.7, 0.0, 0.6], [0.6, 0.0, 0.5]],
        AgentType::Bicycle => vec![[-0.55, 0.0, 0.3], [0.55, 0.0, 0.3]],
        AgentType::Pedestrian => vec![[0.0, -0.15, 0.2], [0.0, 0.15, 0.2]],
    };
    let disks: Vec<Disk> = disks.into_iter().map(Disk::from).collect();
    let params = DynamicsParams::defaults(t);
    let mid = CtmatShape::centered(disks.clone()).unwrap().midpoint();
    let offset = if t.is_vehicle() {
        mid + Vec2::new(0.5 * params.wheelbase, 0.0)
    } else {
        mid
    };
    CtmatShape::new(disks, offset).unwrap()
}

pub fn agent(id: u32, t: AgentType, at: Vec2, theta: f64, goal: Vec2, v: f64, phi: f64) -> AgentState {
    AgentState::new(id, body(t), DynamicsParams::defaults(t), at, theta, goal, v, phi)
}

pub fn disk_obstacle(id: u32, at: Vec2, r: f64) -> Obstacle {
    Obstacle {
        id,
        shape: CtmatShape::centered(vec![Disk::new(at, r)]).unwrap(),
    }
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub const DENSE_FIXTURES: [&str; 6] = [
    "dense_1.json",
    "dense_2.json",
    "dense_3.json",
    "dense_4.json",
    "dense_5.json",
    "dense_6.json",
];

pub fn any_type() -> impl Strategy<Value = AgentType> {
    prop::sample::select(AgentType::ALL.to_vec())
}

/// Raw draw for one agent: type, polar position, heading, speed fraction,
/// steering fraction.
pub type AgentDraw = (AgentType, f64, f64, f64, f64, f64);

pub fn agent_draw() -> impl Strategy<Value = AgentDraw> {
    (
        any_type(),
        3.0f64..12.0,
        -3.2f64..3.2,
        -3.2f64..3.2,
        0.0f64..0.6,
        -1.0f64..1.0,
    )
}

/// A subject at the origin plus neighbours from `draws`, dropping any that
/// would overlap an agent already placed.
pub fn build_world(subject: (AgentType, f64, f64, f64), draws: &[AgentDraw]) -> (AgentState, Vec<AgentState>) {
    let (t, theta, vf, goal_bearing) = subject;
    let p = DynamicsParams::defaults(t);
    let me = agent(
        1,
        t,
        Vec2::ZERO,
        theta,
        Vec2::from_angle(goal_bearing) * 25.0,
        vf * p.v_max_type,
        0.0,
    );
    let mut shapes = vec![me.placed_shape()];
    let mut others = Vec::new();
    for (i, &(t, r, bearing, heading, vf, pf)) in draws.iter().enumerate() {
        let p = DynamicsParams::defaults(t);
        let at = Vec2::from_angle(bearing) * r;
        let a = agent(
            10 + i as u32,
            t,
            at,
            heading,
            at + Vec2::from_angle(heading) * 20.0,
            vf * p.v_max_type,
            pf * p.phi_max,
        );
        let s = a.placed_shape();
        if shapes.iter().any(|o| shapes_overlap(o, &s)) {
            continue;
        }
        shapes.push(s);
        others.push(a);
    }
    (me, others)
}
