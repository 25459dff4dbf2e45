//! Plans under incomplete information: each agent follows a conditional
//! plan that branches on its own observed state, and the initial
//! configuration is only known to lie in a set.

mod dag;
mod encoding;
mod monitor;
mod run;
mod verify;

pub use dag::{lift, random_cplan, ConditionalPlanDag, NodeId, PlanNode};
pub use encoding::{decode_cplan, encode_cplan};
pub use monitor::{DetectionMonitor, MonitorEvent};
pub use run::{
    execute_conditional, verify_ii_efficiency, ConditionalRun, IiEfficiency, InitialSet,
};
pub use verify::verify_ii_stability;
