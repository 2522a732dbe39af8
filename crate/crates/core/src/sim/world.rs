use rayon::prelude::*;

use crate::agent::{AgentId, AgentState, Obstacle, PrevControl};
use crate::geometry::{point_shape_distance, shapes_overlap, CtmatShape};
use crate::navigation::{advance_control, plan_step, NavConfig, Neighbor, PlanOutcome};

use super::log::{Arrival, AuditEvent, Party, TrajectoryLog, TrajectoryRecord};
use super::scenario::Scenario;

/// Environment variable capping the number of planning threads.
pub const THREADS_ENV: &str = "AUTORVO_THREADS";

/// Observer of the two step phases, for instrumentation and tests.
pub trait StepHooks: Sync {
    fn plan_started(&self, _step: usize, _agent: AgentId) {}
    fn plan_finished(&self, _step: usize, _agent: AgentId) {}
    fn committed(&self, _step: usize, _agent: AgentId) {}
}

/// Hooks that do nothing.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoHooks;

impl StepHooks for NoHooks {}

#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub step: usize,
    pub agents: Vec<AgentState>,
    pub obstacles: Vec<Obstacle>,
    pub nav: NavConfig,
    pub goal_radius: f64,
}

/// What happened during one step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepReport {
    /// Indices into `world.agents` of agents that planned this step.
    pub active: Vec<usize>,
    pub audit: Vec<AuditEvent>,
    pub arrivals: Vec<Arrival>,
    pub emergency_stops: usize,
}

impl World {
    pub fn new(scenario: &Scenario) -> Self {
        let mut world = Self {
            step: 0,
            agents: scenario.agents.clone(),
            obstacles: scenario.obstacles.clone(),
            nav: scenario.nav.clone(),
            goal_radius: scenario.goal_radius,
        };
        for a in &mut world.agents {
            a.arrived = a.reference_point().distance(a.goal) <= world.goal_radius;
        }
        world
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.nav.tau
    }

    pub fn all_arrived(&self) -> bool {
        self.agents.iter().all(|a| a.arrived)
    }

    pub fn agent(&self, id: AgentId) -> Option<&AgentState> {
        self.agents.iter().find(|a| a.id == id)
    }
}

/// Other active agents and obstacles whose nearest point lies within `radius`
/// of the agent's reference point, nearest first (agents before obstacles on
/// ties, then by id).
pub fn neighbors_of<'w>(world: &'w World, agent: &AgentState, radius: f64) -> Vec<Neighbor<'w>> {
    let origin = agent.reference_point();
    let mut found: Vec<(f64, u8, u32, Neighbor<'w>)> = Vec::new();
    for other in &world.agents {
        if other.id == agent.id || other.arrived {
            continue;
        }
        let d = point_shape_distance(&other.placed_shape(), origin);
        if d <= radius {
            found.push((d, 0, other.id.0, Neighbor::Agent(other)));
        }
    }
    for o in &world.obstacles {
        let d = point_shape_distance(&o.shape, origin);
        if d <= radius {
            found.push((d, 1, o.id, Neighbor::Obstacle(o)));
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    found.into_iter().map(|f| f.3).collect()
}

/// One lockstep update: every active agent plans against the same frozen
/// world, then all selected controls are integrated and the result audited.
pub fn step(world: &mut World, hooks: &dyn StepHooks) -> StepReport {
    let step_no = world.step + 1;
    let active: Vec<usize> = (0..world.agents.len()).filter(|&i| !world.agents[i].arrived).collect();

    let snapshot: &World = world;
    let plans: Vec<PlanOutcome> = active
        .par_iter()
        .map(|&i| {
            let agent = &snapshot.agents[i];
            hooks.plan_started(step_no, agent.id);
            let neighbors = neighbors_of(snapshot, agent, snapshot.nav.detection_radius);
            let plan = plan_step(agent, &neighbors, &snapshot.nav);
            hooks.plan_finished(step_no, agent.id);
            plan
        })
        .collect();

    let nav = world.nav.clone();
    let mut report = StepReport {
        active: active.clone(),
        ..StepReport::default()
    };
    let time = step_no as f64 * nav.tau;
    for (&i, plan) in active.iter().zip(&plans) {
        let agent = &mut world.agents[i];
        let next = advance_control(
            &agent.control,
            &agent.dyn_params,
            plan.v,
            plan.angle,
            nav.tau,
            nav.integrator_substeps,
        );
        agent.control = match next {
            Ok(c) => c,
            Err(_) => advance_control(
                &agent.control,
                &agent.dyn_params,
                0.0,
                agent.control.control_angle(),
                nav.tau,
                1,
            )
            .unwrap_or(agent.control),
        };
        agent.prev_control = PrevControl {
            v: plan.v,
            angle: plan.angle,
        };
        agent.behavior = plan.behavior;
        report.emergency_stops += usize::from(plan.emergency);
        hooks.committed(step_no, agent.id);
        if agent.reference_point().distance(agent.goal) <= world.goal_radius {
            agent.arrived = true;
            report.arrivals.push(Arrival {
                id: agent.id,
                step: step_no,
                time,
            });
        }
    }
    world.step = step_no;
    report.audit = audit(world, &active, step_no, time);
    report
}

/// Overlapping pairs among the agents that were active this step, and
/// between those agents and obstacles.
pub fn audit(world: &World, active: &[usize], step: usize, time: f64) -> Vec<AuditEvent> {
    let placed: Vec<CtmatShape> = active.iter().map(|&i| world.agents[i].placed_shape()).collect();
    let mut events = Vec::new();
    for x in 0..active.len() {
        let a = &world.agents[active[x]];
        for y in x + 1..active.len() {
            if shapes_overlap(&placed[x], &placed[y]) {
                let b = &world.agents[active[y]];
                let (p, q) = order(Party::Agent(a.id.0), Party::Agent(b.id.0));
                events.push(AuditEvent { step, time, a: p, b: q });
            }
        }
        for o in &world.obstacles {
            if shapes_overlap(&placed[x], &o.shape) {
                events.push(AuditEvent {
                    step,
                    time,
                    a: Party::Agent(a.id.0),
                    b: Party::Obstacle(o.id),
                });
            }
        }
    }
    events.sort_by_key(|l| (l.a, l.b));
    events
}

fn order(a: Party, b: Party) -> (Party, Party) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Thread pool honouring the thread cap from the environment.
pub fn worker_pool() -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        if n > 0 {
            builder = builder.num_threads(n);
        }
    }
    builder.build().expect("thread pool")
}

/// Simulates until every agent arrives or the duration elapses.
pub fn run(scenario: &Scenario) -> TrajectoryLog {
    run_with_hooks(scenario, &NoHooks)
}

pub fn run_with_hooks(scenario: &Scenario, hooks: &dyn StepHooks) -> TrajectoryLog {
    let pool = worker_pool();
    pool.install(|| simulate(scenario, hooks))
}

/// Simulation loop on the caller's rayon thread pool.
pub fn simulate(scenario: &Scenario, hooks: &dyn StepHooks) -> TrajectoryLog {
    let mut world = World::new(scenario);
    let tau = world.nav.tau;
    let max_steps = (scenario.duration / tau - 1e-9).ceil().max(0.0) as usize;

    let mut log = TrajectoryLog {
        tau,
        steps: 0,
        records: world.agents.iter().map(|a| TrajectoryRecord::of(a, 0, 0.0)).collect(),
        audit: Vec::new(),
        arrivals: Vec::new(),
        emergency_stops: 0,
        config: config_echo(scenario),
    };
    while world.step < max_steps && !world.all_arrived() {
        let report = step(&mut world, hooks);
        let time = world.time();
        for &i in &report.active {
            log.records
                .push(TrajectoryRecord::of(&world.agents[i], world.step, time));
        }
        log.audit.extend(report.audit);
        log.arrivals.extend(report.arrivals);
        log.emergency_stops += report.emergency_stops;
    }
    log.steps = world.step;
    log
}

fn config_echo(scenario: &Scenario) -> serde_json::Value {
    let e = &scenario.effective;
    serde_json::json!({
        "nav": e.nav,
        "agent_types": e.agent_types,
        "duration": e.duration,
        "goal_radius": e.goal_radius,
        "seed": e.seed,
    })
}
