use std::collections::{BTreeSet, VecDeque};

use rand::seq::index::sample;
use rand::Rng;

use super::Draft;
use crate::game::{BuildingId, GameDefinition, ItemKind, NpcRole, ObjectRef};
use crate::rng::GameRng;

/// Buildings in the order a player can first reach them, ignoring locks:
/// breadth-first from the start building and the start city's landmark,
/// following the clues spoken or carried by each building's contents.
///
/// Buildings no clue leads to are omitted.
pub fn building_order(game: &GameDefinition) -> Vec<BuildingId> {
    let opened_by = |target: &ObjectRef| -> Option<BuildingId> {
        match target {
            ObjectRef::City(c) => game.city(c).and_then(|c| c.buildings.first().cloned()),
            ObjectRef::Building(b) => Some(b.clone()),
            ObjectRef::Npc(n) => game.npc(n).map(|n| n.building.clone()),
            ObjectRef::Item(i) => game.item(i).map(|i| i.building.clone()),
        }
    };
    let mut order = Vec::new();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    let mut initial = vec![game.start_building.clone()];
    if let Some(landmark) = game.city(&game.start_city).and_then(|c| c.buildings.first()) {
        initial.push(landmark.clone());
    }
    for b in initial {
        if seen.insert(b.clone()) {
            queue.push_back(b);
        }
    }
    while let Some(b) = queue.pop_front() {
        let Some(building) = game.building(&b) else { continue };
        order.push(b.clone());
        let mut clues = Vec::new();
        for n in &building.occupants {
            if let Some(npc) = game.npc(n) {
                clues.extend(npc.clues_held.iter().cloned());
            }
        }
        for i in &building.items {
            if let Some(item) = game.item(i) {
                clues.extend(item.reveals.iter().cloned());
            }
        }
        for c in clues {
            let Some(next) = game.clue(&c).and_then(|c| opened_by(&c.target)) else {
                continue;
            };
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    order
}

/// Locks up to `lock_count` buildings (default `min(2, reachable - 1)`) and
/// puts each one's key in a building strictly earlier in
/// [`building_order`]. The start building is never locked and keys are
/// never hidden in a suspect's house. Requests above the number of
/// lockable buildings are clamped with a warning.
pub fn place_locks_and_keys(d: &mut Draft, lock_count: Option<usize>, rng: &mut GameRng) {
    let order = building_order(&d.game);
    let lockable = order.len().saturating_sub(1);
    let wanted = lock_count.unwrap_or(2.min(lockable));
    let count = if wanted > lockable {
        d.warnings.push(format!(
            "requested {wanted} locks but only {lockable} buildings can be locked"
        ));
        lockable
    } else {
        wanted
    };
    if count == 0 {
        return;
    }
    let suspect_house = |d: &Draft, b: &BuildingId| {
        d.game.building(b).is_some_and(|b| {
            b.occupants
                .iter()
                .any(|n| d.game.npc(n).is_some_and(|n| n.role == NpcRole::Suspect))
        })
    };
    let mut positions: Vec<usize> = sample(rng, lockable, count).into_iter().map(|i| i + 1).collect();
    positions.sort_unstable();
    for pos in positions {
        let locked = order[pos].clone();
        let spots: Vec<&BuildingId> = order[..pos].iter().filter(|b| !suspect_house(d, b)).collect();
        let spot = spots[rng.gen_range(0..spots.len())].clone();
        let name = format!("Key to {}", d.game.building(&locked).expect("listed").display_name);
        let key = d.add_item(&name, ItemKind::Key, None, None, &spot);
        d.item_mut(&key).unlocks = Some(locked.clone());
        d.building_mut(&locked).locked_by = Some(key);
    }
}
