//! The three event schemas and their slot inventories.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EventType {
    Launch,
    Failure,
    Decommissioning,
}

impl EventType {
    pub const ALL: [EventType; 3] = [EventType::Launch, EventType::Failure, EventType::Decommissioning];

    pub fn as_str(self) -> &'static str {
        match self {
            EventType::Launch => "LAUNCH",
            EventType::Failure => "FAILURE",
            EventType::Decommissioning => "DECOMMISSIONING",
        }
    }

    /// Title-case name used in report tables.
    pub fn title(self) -> &'static str {
        match self {
            EventType::Launch => "Launch",
            EventType::Failure => "Failure",
            EventType::Decommissioning => "Decommissioning",
        }
    }

    pub fn schema(self) -> &'static EventSchema {
        match self {
            EventType::Launch => &LAUNCH,
            EventType::Failure => &FAILURE,
            EventType::Decommissioning => &DECOMMISSIONING,
        }
    }
}

impl fmt::Display for EventType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventType {
    type Err = Error;

    /// Case-insensitive.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "LAUNCH" => Ok(EventType::Launch),
            "FAILURE" => Ok(EventType::Failure),
            "DECOMMISSIONING" => Ok(EventType::Decommissioning),
            _ => Err(Error::invalid(format!("unknown event type `{s}`"))),
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct SlotSpec {
    pub name: &'static str,
    /// Entity types that may fill the slot; empty for slots with no
    /// dedicated entity type (filled by chunks only).
    pub filler_types: &'static [&'static str],
    /// Generic slots occur in every schema and are scored across events.
    pub generic: bool,
}

#[derive(Debug, PartialEq, Eq)]
pub struct EventSchema {
    pub event_type: EventType,
    pub slots: &'static [SlotSpec],
    /// An event is valid only if at least one of these slots is filled.
    pub mandatory_any: &'static [&'static str],
}

pub const SATELLITE_NAME: &str = "SatelliteName";
pub const LAUNCH_VEHICLE: &str = "LaunchVehicle";
pub const LAUNCH_SITE: &str = "LaunchSite";
pub const TARGET_ORBIT: &str = "TargetOrbit";
pub const FAILURE_TYPE: &str = "FailureType";
pub const ORGANIZATION: &str = "Organization";
pub const DATE: &str = "Date";

/// Slots shared by all schemas, micro-averaged in reports.
pub const GENERIC_SLOTS: [&str; 2] = [ORGANIZATION, DATE];

const SATELLITE: SlotSpec = SlotSpec {
    name: SATELLITE_NAME,
    filler_types: &["SPACECRAFT"],
    generic: false,
};
const VEHICLE: SlotSpec = SlotSpec {
    name: LAUNCH_VEHICLE,
    filler_types: &["LAUNCH_VEHICLE"],
    generic: false,
};
const ORG: SlotSpec = SlotSpec {
    name: ORGANIZATION,
    filler_types: &["ORGANIZATION"],
    generic: true,
};
const WHEN: SlotSpec = SlotSpec {
    name: DATE,
    filler_types: &["DATE"],
    generic: true,
};

pub static LAUNCH: EventSchema = EventSchema {
    event_type: EventType::Launch,
    slots: &[
        SATELLITE,
        VEHICLE,
        SlotSpec {
            name: LAUNCH_SITE,
            filler_types: &["LAUNCH_SITE"],
            generic: false,
        },
        SlotSpec {
            name: TARGET_ORBIT,
            filler_types: &[],
            generic: false,
        },
        ORG,
        WHEN,
    ],
    mandatory_any: &[SATELLITE_NAME],
};

pub static FAILURE: EventSchema = EventSchema {
    event_type: EventType::Failure,
    slots: &[
        SATELLITE,
        VEHICLE,
        SlotSpec {
            name: FAILURE_TYPE,
            filler_types: &[],
            generic: false,
        },
        ORG,
        WHEN,
    ],
    mandatory_any: &[SATELLITE_NAME, LAUNCH_VEHICLE],
};

pub static DECOMMISSIONING: EventSchema = EventSchema {
    event_type: EventType::Decommissioning,
    slots: &[SATELLITE, ORG, WHEN],
    mandatory_any: &[SATELLITE_NAME],
};

impl EventSchema {
    pub fn slot(&self, name: &str) -> Option<&SlotSpec> {
        self.slots.iter().find(|s| s.name == name)
    }

    pub fn has_slot(&self, name: &str) -> bool {
        self.slot(name).is_some()
    }

    pub fn slot_names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.slots.iter().map(|s| s.name)
    }
}
