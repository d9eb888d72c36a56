//! Scenario description: identifiers, configuration, RB pools and random
//! topology generation.

mod config;
mod geometry;
mod seed;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use config::ScenarioConfig;
pub use geometry::{point_in_hexagon, sample_in_disc, sample_in_hexagon, Point};
pub use seed::{SeedStreams, Stream};

use crate::error::{Error, Result};

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident, $prefix:literal) => {
        $(#[$meta])*
        #[derive(
            Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub usize);

        impl $name {
            pub fn index(self) -> usize {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_type!(
    /// A tenant (virtual operator). Tenant 0 is "A", tenant 1 is "B".
    TenantId,
    "tenant"
);
id_type!(RbId, "rb");
id_type!(LinkId, "link");
id_type!(CueId, "cue");

impl TenantId {
    pub fn label(self) -> String {
        match self.0 {
            n @ 0..=25 => char::from(b'A' + n as u8).to_string(),
            n => format!("T{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cue {
    pub position: Point,
    pub tenant: TenantId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct D2dLink {
    pub tx: Point,
    pub rx: Point,
    /// Tenant of the subscriber that initiates the session; under the
    /// legacy scheme it pays for the link with its own pool.
    pub initiator: TenantId,
    pub receiver: TenantId,
}

impl D2dLink {
    pub fn length_m(&self) -> f64 {
        self.tx.distance(&self.rx)
    }
}

/// Per-tenant RB pools. Tenant `n` owns a contiguous block of ids, so the
/// pools are disjoint and their union is `0..total`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RbPools {
    pools: Vec<Vec<RbId>>,
}

impl RbPools {
    pub fn from_sizes(sizes: &[usize]) -> Self {
        let mut next = 0;
        let pools = sizes
            .iter()
            .map(|&k| {
                let pool = (next..next + k).map(RbId).collect();
                next += k;
                pool
            })
            .collect();
        Self { pools }
    }

    pub fn num_tenants(&self) -> usize {
        self.pools.len()
    }

    pub fn total(&self) -> usize {
        self.pools.iter().map(Vec::len).sum()
    }

    pub fn pool(&self, tenant: TenantId) -> &[RbId] {
        &self.pools[tenant.0]
    }

    /// All RBs of all tenants, in id order.
    pub fn fused(&self) -> Vec<RbId> {
        self.pools.iter().flatten().copied().collect()
    }

    pub fn owner(&self, rb: RbId) -> Option<TenantId> {
        self.pools
            .iter()
            .position(|pool| pool.contains(&rb))
            .map(TenantId)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub bs_position: Point,
    pub cell_radius_m: f64,
    pub cues: Vec<Cue>,
    pub links: Vec<D2dLink>,
    pub rb_pools: RbPools,
}

impl Topology {
    pub fn link_ids(&self) -> impl Iterator<Item = LinkId> + '_ {
        (0..self.links.len()).map(LinkId)
    }

    pub fn link(&self, id: LinkId) -> &D2dLink {
        &self.links[id.0]
    }

    pub fn cues_of(&self, tenant: TenantId) -> impl Iterator<Item = CueId> + '_ {
        self.cues
            .iter()
            .enumerate()
            .filter(move |(_, c)| c.tenant == tenant)
            .map(|(i, _)| CueId(i))
    }

    pub fn links_initiated_by(&self, tenant: TenantId) -> Vec<LinkId> {
        self.link_ids()
            .filter(|&l| self.link(l).initiator == tenant)
            .collect()
    }
}

/// Receiver placement gives up after this many draws fall outside the cell.
const MAX_RX_ATTEMPTS: usize = 100_000;

/// Draws a random multi-tenant topology.
///
/// CUEs and D2D transmitters are uniform over the hexagonal cell; each
/// receiver is uniform in the disc of radius `max_d2d_range_m` around its
/// transmitter, redrawn until it falls inside the cell. Every draw comes
/// from a stream keyed by what it positions (see [`Stream`]), so changing
/// the number of links or the link range leaves all other draws untouched.
pub fn generate_topology(cfg: &ScenarioConfig, seeds: &SeedStreams) -> Result<Topology> {
    cfg.validate()?;
    let radius = cfg.cell_radius_m;

    let mut cue_rng = seeds.rng(Stream::CuePositions);
    let mut cues = Vec::with_capacity(cfg.num_cues);
    for (tenant, count) in cfg.cue_counts().into_iter().enumerate() {
        for _ in 0..count {
            cues.push(Cue {
                position: sample_in_hexagon(&mut cue_rng, radius),
                tenant: TenantId(tenant),
            });
        }
    }

    let mut links = Vec::with_capacity(cfg.num_d2d_links);
    for i in 0..cfg.num_d2d_links {
        let mut rng = seeds.rng(Stream::LinkGeometry(i));
        let tx = sample_in_hexagon(&mut rng, radius);
        let rx = (0..MAX_RX_ATTEMPTS)
            .map(|_| sample_in_disc(&mut rng, tx, cfg.max_d2d_range_m))
            .find(|p| point_in_hexagon(*p, radius))
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "could not place a receiver within {} m of its transmitter inside the cell",
                    cfg.max_d2d_range_m
                ))
            })?;
        let initiator = match &cfg.initiator_tenants {
            Some(explicit) => explicit[i],
            None => i % cfg.num_tenants,
        };
        links.push(D2dLink {
            tx,
            rx,
            initiator: TenantId(initiator),
            receiver: TenantId((initiator + 1) % cfg.num_tenants),
        });
    }

    Ok(Topology {
        bs_position: Point::ORIGIN,
        cell_radius_m: radius,
        cues,
        links,
        rb_pools: RbPools::from_sizes(&cfg.rb_pool_sizes),
    })
}
