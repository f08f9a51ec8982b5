#include "streamfdr/snapshot.hpp"

#include "streamfdr/errors.hpp"
#include "streamfdr/procedures.hpp"

#include <json.hpp>
#include <zlib.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace streamfdr {

using nlohmann::ordered_json;

namespace {

std::string crc_hex(const std::string& payload) {
    const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(payload.data()),
                           static_cast<uInt>(payload.size()));
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
    return buf;
}

ordered_json procedure_json(const ProcedureParams& p) {
    ordered_json j;
    j["name"] = p.name;
    j["alpha"] = p.alpha;
    j["w0"] = p.w0;
    j["lambda"] = p.lambda;
    j["eta"] = p.eta;
    if (p.name != "uncorrected") {
        j["gamma"] = p.gamma.describe();
        j["gamma_origin"] = p.gamma.origin();
        if (p.gamma.kind() == GammaKind::custom) j["gamma_values"] = p.gamma.custom_values();
    }
    return j;
}

ordered_json state_json(const ProcedureState& s) {
    ordered_json j;
    j["t"] = s.summary.t;
    j["rejection_times"] = s.summary.rejection_times;
    j["candidates"] = s.candidates.total;
    j["candidates_through_rejection"] = s.candidates.through_rejection;
    j["selected"] = s.selection.total;
    j["rejection_ranks"] = s.selection.rejection_ranks;
    j["level_sum"] = s.level_sum;
    j["pending_level"] = s.pending_level ? ordered_json(*s.pending_level) : ordered_json(nullptr);

    ordered_json ledger;
    ledger["wealth"] = s.ledger.wealth();
    ledger["anchor"] = s.ledger.anchor();
    ledger["rejections"] = s.ledger.rejections();
    ordered_json tail = ordered_json::array();
    for (const auto& e : s.ledger.tail()) {
        tail.push_back(ordered_json::array({e.penalty, e.payout, e.bound, e.rejected}));
    }
    ledger["tail"] = std::move(tail);
    j["ledger"] = std::move(ledger);
    return j;
}

[[noreturn]] void corrupt(const std::string& what) {
    throw Error(ErrorKind::integrity, "snapshot rejected: " + what);
}

ProcedureConfig config_from(const ordered_json& j) {
    ProcedureConfig c;
    c.name = j.at("name").get<std::string>();
    c.alpha = j.at("alpha").get<double>();
    c.w0 = j.at("w0").get<double>();
    c.lambda = j.at("lambda").get<double>();
    c.eta = j.at("eta").get<double>();
    if (j.contains("gamma")) {
        const int origin = j.at("gamma_origin").get<int>();
        if (j.contains("gamma_values")) {
            c.gamma_sequence = GammaSequence::custom(j.at("gamma_values").get<std::vector<double>>(), origin);
        } else {
            c.gamma_sequence = parse_gamma(j.at("gamma").get<std::string>(), origin);
        }
    }
    return c;
}

ProcedureState state_from(const ordered_json& j, const Procedure& procedure) {
    ProcedureState s = procedure.initial_state();
    s.summary.t = j.at("t").get<std::uint64_t>();
    s.summary.rejection_times = j.at("rejection_times").get<std::vector<std::uint64_t>>();
    s.candidates.total = j.at("candidates").get<std::uint64_t>();
    s.candidates.through_rejection = j.at("candidates_through_rejection").get<std::vector<std::uint64_t>>();
    s.selection.total = j.at("selected").get<std::uint64_t>();
    s.selection.rejection_ranks = j.at("rejection_ranks").get<std::vector<std::uint64_t>>();
    s.level_sum = j.at("level_sum").get<double>();
    if (!j.at("pending_level").is_null()) s.pending_level = j.at("pending_level").get<double>();

    const auto n = s.summary.rejection_times.size();
    if (s.candidates.through_rejection.size() != n || s.selection.rejection_ranks.size() != n) {
        corrupt("rejection bookkeeping lengths disagree");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (s.summary.rejection_times[i] > s.summary.t || (i > 0 && s.summary.rejection_times[i] <= s.summary.rejection_times[i - 1])) {
            corrupt("rejection times are not increasing within 1..t");
        }
    }

    const auto& l = j.at("ledger");
    std::deque<LedgerEntry> tail;
    for (const auto& e : l.at("tail")) {
        tail.push_back({e.at(0).get<double>(), e.at(1).get<double>(), e.at(2).get<double>(), e.at(3).get<bool>()});
    }
    const auto& p = procedure.params();
    s.ledger = WealthLedger::restore(p.alpha, p.w0, l.at("wealth").get<double>(), l.at("anchor").get<double>(),
                                     l.at("rejections").get<std::uint64_t>(), std::move(tail));
    return s;
}

}  // namespace

std::string serialize_snapshot(const Engine& engine) {
    ordered_json doc;
    doc["schema"] = kSnapshotSchema;
    doc["procedure"] = procedure_json(engine.procedure().params());
    doc["state"] = state_json(engine.state());
    doc["checksum"] = crc_hex(doc.dump());
    return doc.dump(2) + "\n";
}

Engine restore_snapshot(std::string_view text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        corrupt(std::string("not valid JSON (") + e.what() + ")");
    }
    if (!doc.is_object() || !doc.contains("checksum") || !doc["checksum"].is_string()) {
        corrupt("missing checksum");
    }
    const std::string stored = doc["checksum"].get<std::string>();
    doc.erase("checksum");
    if (crc_hex(doc.dump()) != stored) corrupt("checksum mismatch");
    if (!doc.contains("schema") || !doc["schema"].is_number_integer()) corrupt("missing schema version");
    if (doc["schema"].get<int>() != kSnapshotSchema) {
        corrupt("unsupported schema version " + doc["schema"].dump());
    }
    try {
        auto procedure = make_procedure(config_from(doc.at("procedure")));
        auto state = state_from(doc.at("state"), *procedure);
        return Engine(std::move(procedure), std::move(state));
    } catch (const nlohmann::json::exception& e) {
        corrupt(std::string("malformed field (") + e.what() + ")");
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::integrity) throw;
        corrupt(e.what());
    }
}

double next_level_preview(std::string_view snapshot_text) {
    return restore_snapshot(snapshot_text).preview();
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::io, "cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw Error(ErrorKind::io, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorKind::io, "cannot replace " + path.string());
    }
}

StateLock::StateLock(std::filesystem::path state_path) : lock_path_(std::move(state_path)) {
    lock_path_ += ".lock";
    const int fd = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        if (errno == EEXIST) {
            throw Error(ErrorKind::integrity, "state is locked by another run (" + lock_path_.string() + ")");
        }
        throw Error(ErrorKind::io, "cannot create lock " + lock_path_.string() + ": " + std::strerror(errno));
    }
    const auto pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto written = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

StateLock::~StateLock() {
    std::error_code ec;
    std::filesystem::remove(lock_path_, ec);
}

}  // namespace streamfdr
