#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "blockpki/certificates/payload.hpp"
#include "blockpki/crypto/multisig.hpp"
#include "blockpki/ledger/chain.hpp"

namespace blockpki::contracts {

using ledger::Event;

inline constexpr const char* kNewDomainContract = "newDomainContract";
inline constexpr const char* kAllCertNoncesGathered = "allCertNoncesGathered";
inline constexpr const char* kAllCertSignaturesGathered = "allCertSignaturesGathered";

struct DomainContractState {
  Address address;
  Address requester;
  std::uint64_t round = 0;
  std::uint64_t created_height = 0;
  std::uint64_t round_start_height = 0;
  certs::CertData cert_data;
  std::vector<Address> authorized_cas;
  std::map<Address, Amount> compensations;
  std::size_t threshold = 0;
  bool first_t_mode = false;

  // Submission order is kept; in first-T mode it fixes the signer set.
  std::vector<std::pair<Address, crypto::GroupElement>> cert_pub_nonces;
  bool all_cert_nonces = false;
  std::uint64_t nonces_gathered_height = 0;
  std::vector<std::pair<Address, crypto::Scalar>> cert_sigs;
  std::set<Address> paid;
  bool all_cert_sigs = false;
  bool cancelled = false;

  bool is_authorized(const Address& ca) const;
  std::optional<crypto::GroupElement> nonce_of(const Address& ca) const;
  std::optional<crypto::Scalar> signature_of(const Address& ca) const;
  Amount total_compensation() const;
  Amount unpaid_compensation() const;
};

struct StoredCertificateRecord {
  certs::CertificatePayload payload;
  Address sender;
  Hash256 tx_hash{};
  std::uint64_t block_height = 0;
  std::size_t index = 0;
};

// Decides whether a submitted partial is valid. Only consulted when on-chain
// signature checking is enabled.
using PartialCheck = std::function<bool(const DomainContractState&, const Address& ca, const crypto::Scalar& s)>;

struct RuntimeConfig {
  bool on_chain_sig_check = false;
  std::uint64_t cancel_timeout_blocks = 20;
};

struct CreateArgs {
  certs::CertData cert_data;
  std::vector<Address> authorized_cas;
  std::vector<Amount> compensations;  // aligned with authorized_cas
  // Set only in first-T mode, where it must be below the number of authorized CAs.
  std::optional<std::size_t> threshold;
};

// Call payload builders: canonical JSON {method, args}.
std::string call_create_domain_contract(const CreateArgs& args);
std::string call_send_cert_pub_nonce(const crypto::GroupElement& nonce);
std::string call_send_cert_signature(const crypto::Group& group, const crypto::Scalar& s);
std::string call_renew(std::int64_t not_before, std::int64_t not_after);
std::string call_store_certificate(const crypto::Group& group, const certs::CertificatePayload& payload);
std::string call_withdraw_surplus();
std::string call_cancel();

// Hosts the central, storage and per-request domain contracts.
class Runtime : public ledger::ContractHost {
 public:
  Runtime(crypto::GroupParams params, ledger::GasSchedule gas, RuntimeConfig config = {});

  static Address central_address();
  static Address storage_address();

  bool is_contract(const Address& address) const override;
  ledger::ExecResult execute(ledger::ExecutionContext& ctx) override;

  void set_partial_check(PartialCheck check) { partial_check_ = std::move(check); }

  const std::vector<Address>& domain_contracts() const { return created_; }
  // Throws InvalidParams for an unknown address.
  const DomainContractState& domain(const Address& address) const;
  const std::vector<StoredCertificateRecord>& stored_certificates() const { return stored_; }
  const crypto::GroupParams& params() const { return params_; }
  const RuntimeConfig& config() const { return config_; }

 private:
  ledger::ExecResult create_domain_contract(ledger::ExecutionContext& ctx, const Json& args);
  ledger::ExecResult send_cert_pub_nonce(ledger::ExecutionContext& ctx, DomainContractState& st, const Json& args);
  ledger::ExecResult send_cert_signature(ledger::ExecutionContext& ctx, DomainContractState& st, const Json& args);
  ledger::ExecResult renew(ledger::ExecutionContext& ctx, DomainContractState& st, const Json& args);
  ledger::ExecResult withdraw_surplus(ledger::ExecutionContext& ctx, DomainContractState& st);
  ledger::ExecResult cancel(ledger::ExecutionContext& ctx, DomainContractState& st);
  ledger::ExecResult store_certificate(ledger::ExecutionContext& ctx, const Json& args);

  crypto::GroupParams params_;
  ledger::GasSchedule gas_;
  RuntimeConfig config_;
  PartialCheck partial_check_;
  std::vector<Address> created_;
  std::map<Address, DomainContractState> domains_;
  std::vector<StoredCertificateRecord> stored_;
};

// Events in [from, to] in block order, optionally filtered by kind.
std::vector<Event> scan_events(const ledger::BlockStore& store, std::uint64_t from, std::uint64_t to,
                               std::optional<std::string> kind = std::nullopt);

}  // namespace blockpki::contracts
