// Copyright 2026 The Policy Arena Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace policy_arena {

// Every rejection the library can produce. The names are stable: they are
// written to event logs, protocol Error messages and CLI stderr.
enum class Errc {
  // rules
  UnknownMember,
  UnknownCard,
  CardReuse,
  MemberNotInOffice,
  MissingBallot,
  DuplicateBallot,
  BallotFromRemovedMember,
  UnknownVoter,
  TargetNotInOffice,
  GameNotFinished,
  // scenario content
  ParseError,
  ValidationError,
  UnsupportedVersion,
  // session
  InvalidConfig,
  NotEnoughPlayers,
  WrongPhase,
  NotEvilInc,
  NotFacilitator,
  NotCongress,
  AlreadySpoke,
  NotInOffice,
  ForcedMemberManualVote,
  UnknownPlayer,
  CorruptLog,
  VersionMismatch,
  // agents
  PolicyIllegalAction,
  // protocol
  UnknownScenario,
  AuthFailed,
  MalformedPayload,
  SessionFull,
  DuplicateConnection,
  // survey
  NotLikert,
  NoResponses,
  InstrumentMismatch,
  // cli
  BindFailure,
  ContentInvalid,
  UsageError,
  // io
  IoError,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::UnknownMember: return "UnknownMember";
    case Errc::UnknownCard: return "UnknownCard";
    case Errc::CardReuse: return "CardReuse";
    case Errc::MemberNotInOffice: return "MemberNotInOffice";
    case Errc::MissingBallot: return "MissingBallot";
    case Errc::DuplicateBallot: return "DuplicateBallot";
    case Errc::BallotFromRemovedMember: return "BallotFromRemovedMember";
    case Errc::UnknownVoter: return "UnknownVoter";
    case Errc::TargetNotInOffice: return "TargetNotInOffice";
    case Errc::GameNotFinished: return "GameNotFinished";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::NotEnoughPlayers: return "NotEnoughPlayers";
    case Errc::WrongPhase: return "WrongPhase";
    case Errc::NotEvilInc: return "NotEvilInc";
    case Errc::NotFacilitator: return "NotFacilitator";
    case Errc::NotCongress: return "NotCongress";
    case Errc::AlreadySpoke: return "AlreadySpoke";
    case Errc::NotInOffice: return "NotInOffice";
    case Errc::ForcedMemberManualVote: return "ForcedMemberManualVote";
    case Errc::UnknownPlayer: return "UnknownPlayer";
    case Errc::CorruptLog: return "CorruptLog";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::PolicyIllegalAction: return "PolicyIllegalAction";
    case Errc::UnknownScenario: return "UnknownScenario";
    case Errc::AuthFailed: return "AuthFailed";
    case Errc::MalformedPayload: return "MalformedPayload";
    case Errc::SessionFull: return "SessionFull";
    case Errc::DuplicateConnection: return "DuplicateConnection";
    case Errc::NotLikert: return "NotLikert";
    case Errc::NoResponses: return "NoResponses";
    case Errc::InstrumentMismatch: return "InstrumentMismatch";
    case Errc::BindFailure: return "BindFailure";
    case Errc::ContentInvalid: return "ContentInvalid";
    case Errc::UsageError: return "UsageError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

[[noreturn]] inline void fail(Errc code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace policy_arena
