use super::events::BoardEvent;
use super::state::{BoardState, CaStatus, MemberStatus, MotionStatus, ProposalStatus};
use super::BoardError;

/// Moves the logical clock forward and settles everything that became due.
pub fn advance_time(state: &mut BoardState, days: u64) -> Result<Vec<BoardEvent>, BoardError> {
    if days == 0 {
        return Err(BoardError::InvalidParams("days must be at least 1".into()));
    }
    state.day += days;
    let day = state.day;
    let mut events = vec![BoardEvent::DayAdvanced { day }];

    let closing: Vec<u64> = state
        .motions
        .iter()
        .filter(|(_, m)| m.status == MotionStatus::Open && m.deadline <= day)
        .map(|(id, _)| *id)
        .collect();
    for id in closing {
        events.extend(state.reject_motion(id));
    }

    let seated = state.seated_members();
    for (id, p) in state.proposals.proposals.iter_mut() {
        if p.status == ProposalStatus::Voting && p.deadline <= day {
            p.status = ProposalStatus::Rejected;
            p.non_voters = seated
                .iter()
                .filter(|m| !p.votes.contains_key(*m))
                .cloned()
                .collect();
            events.push(BoardEvent::ProposalRejected {
                proposal: *id,
                yes: p.yes_votes(),
                non_voters: p.non_voters.clone(),
            });
        }
    }

    for (id, m) in state.sc.members.iter_mut() {
        if let MemberStatus::Exiting { ready_on, .. } = m.status {
            if ready_on <= day && !m.exit_announced {
                m.exit_announced = true;
                events.push(BoardEvent::ExitFinalizable { entity: id.clone() });
            }
        }
    }
    for (id, c) in state.cas.cas.iter_mut() {
        if let CaStatus::Exiting { ready_on, .. } = c.status {
            if ready_on <= day && !c.exit_announced {
                c.exit_announced = true;
                events.push(BoardEvent::ExitFinalizable { entity: id.clone() });
            }
        }
    }

    for reg_id in state.refresh_renewals() {
        events.push(BoardEvent::RenewalDue { reg_id });
    }
    Ok(events)
}
