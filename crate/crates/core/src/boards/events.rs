use serde::{Deserialize, Serialize};

/// Observable outcomes of applying a transaction or advancing the clock.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum BoardEvent {
    Applied {
        kind: String,
        sender: String,
    },
    Rejected {
        kind: String,
        sender: String,
        rule: String,
    },
    MotionOpened {
        motion: u64,
        action: String,
    },
    MotionPassed {
        motion: u64,
        action: String,
    },
    MotionRejected {
        motion: u64,
        action: String,
        non_voters: Vec<String>,
    },
    ScAdmitted {
        member: String,
    },
    ScExpelled {
        member: String,
        burned: u64,
    },
    ScExitStarted {
        member: String,
        ready_on: u64,
    },
    ScExited {
        member: String,
        released: u64,
    },
    RekeyRequired {
        seated: usize,
    },
    CommitteeRekeyed {
        epoch: u64,
        members: Vec<String>,
    },
    CaAdmitted {
        ca: String,
    },
    CaPenalized {
        ca: String,
        burned: u64,
        score: u64,
    },
    CaExitStarted {
        ca: String,
        ready_on: u64,
    },
    CaTransferRecorded {
        ca: String,
        to: String,
    },
    CaExited {
        ca: String,
        released: u64,
        invalidated: usize,
    },
    AsdAdded {
        reg_id: String,
        ca: String,
        fee: u64,
        burned: u64,
    },
    AsdDeactivated {
        reg_id: String,
    },
    AccountBlocked {
        pk_acc: String,
    },
    Complaint {
        website: String,
        reg_id: String,
        reason: String,
    },
    ProposalSubmitted {
        proposal: u64,
        reg_id: String,
    },
    ProposalApproved {
        proposal: u64,
        yes: usize,
    },
    ProposalRejected {
        proposal: u64,
        yes: usize,
        non_voters: Vec<String>,
    },
    ShareAccepted {
        proposal: u64,
        member: String,
        index: u32,
    },
    RevealExecuted {
        proposal: u64,
        accounts: usize,
    },
    Transfer {
        from: String,
        to: String,
        amount: u64,
    },
    RenewalDue {
        reg_id: String,
    },
    ExitFinalizable {
        entity: String,
    },
    DayAdvanced {
        day: u64,
    },
}

impl BoardEvent {
    pub fn name(&self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.get("event").and_then(|e| e.as_str()).map(str::to_string))
            .unwrap_or_default()
    }
}
