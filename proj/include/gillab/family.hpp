#pragma once

// The nested family C_r over the dyadics r = k/2^L, filled in by bisection,
// and its on-disk cache.

#include "gillab/cantor.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace gillab {

struct CantorFamily {
    int level = 0;
    int budget = 0;
    std::map<Rational, CantorGen> members;

    const CantorGen& at(const Rational& r) const
    {
        auto it = members.find(r);
        if (it == members.end()) throw Error("no family member at " + to_string(r));
        return it->second;
    }
    const CantorGen& c0() const { return members.begin()->second; }
    const CantorGen& c1() const { return members.rbegin()->second; }

    std::vector<Rational> indices() const
    {
        std::vector<Rational> out;
        for (const auto& [r, g] : members) out.push_back(r);
        return out;
    }
};

inline CantorFamily build_family(int level, int stageBudget)
{
    if (level < 0) throw PreconditionError("build_family: negative level");
    if (stageBudget < 0) throw PreconditionError("build_family: negative stage budget");
    CantorFamily fam;
    fam.level = level;
    fam.budget = stageBudget;
    auto c1 = middle_thirds(core_base());
    fam.members.emplace(Rational(0), build_C0(c1));
    fam.members.emplace(Rational(1), c1);
    for (int l = 1; l <= level; ++l) {
        const Integer den = pow_int(2, static_cast<unsigned long>(l));
        for (Integer k = 1; k < den; k += 2) {
            Rational r(k, den);
            Rational lo(k - 1, den), hi(k + 1, den);
            lo.canonicalize();
            hi.canonicalize();
            fam.members.emplace(r, build_intermediate(fam.at(hi), fam.at(lo), stageBudget));
        }
    }
    return fam;
}

// ---------------------------------------------------------------------------
// Cache file

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL)
{
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

inline std::string family_params(int level, int budget)
{
    return "level=" + std::to_string(level) + " budget=" + std::to_string(budget) +
           " window_run=" + std::to_string(kWindowRun) + " format=1";
}

inline std::string family_cache_key(int level, int budget) { return hex64(fnv1a64(family_params(level, budget))); }

inline std::filesystem::path family_cache_path(const std::filesystem::path& dir, int level, int budget)
{
    return dir / ("family-L" + std::to_string(level) + "-B" + std::to_string(budget) + "-" +
                  family_cache_key(level, budget) + ".txt");
}

struct CacheError : Error {
    using Error::Error;
};

inline std::string serialize_family(const CantorFamily& fam)
{
    std::ostringstream os;
    os << "gillab-family\n";
    os << "params " << family_params(fam.level, fam.budget) << "\n";
    os << "key " << family_cache_key(fam.level, fam.budget) << "\n";
    for (const auto& [r, g] : fam.members) {
        os << "member " << to_string(r) << "\n";
        for (int d = 0; d <= fam.budget; ++d) os << "stage " << d << " " << g.stage(d).str() << "\n";
        if (g.kind() != CantorGen::Kind::Intermediate) continue;
        auto sch = g.schedule(fam.budget);
        for (std::size_t i = 0; i < sch.removals.size(); ++i) {
            const auto& w = sch.removals[i];
            os << "removal " << i << " " << w.stage << " " << w.piece.str() << " " << (w.node.empty() ? "-" : w.node)
               << " " << (w.lo ? w.lo->str() : "-") << " " << (w.hi ? w.hi->str() : "-") << "\n";
        }
        for (const auto& e : sch.entries)
            os << "entry " << to_string(e.point.value) << " " << to_string(e.point.side) << " " << e.point.stage << " "
               << e.removal << " " << (e.reused ? "reused" : "new") << "\n";
    }
    std::string body = os.str();
    return body + "checksum " + hex64(fnv1a64(body)) + "\n";
}

inline void save_family_cache(const CantorFamily& fam, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw CacheError("cannot create cache directory " + dir.string() + ": " + ec.message());
    auto path = family_cache_path(dir, fam.level, fam.budget);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw CacheError("cannot write " + tmp.string());
        out << serialize_family(fam);
        if (!out) throw CacheError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw CacheError("cannot move cache into place: " + ec.message());
}

struct CacheNotBuilt : CacheError {
    using CacheError::CacheError;
};

// Reads a cache file, verifies checksum and parameters, and returns a family
// whose stage covers come from the file.
inline CantorFamily load_family_cache(const std::filesystem::path& dir, int level, int budget)
{
    auto path = family_cache_path(dir, level, budget);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CacheNotBuilt("family not built: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    auto pos = text.rfind("checksum ");
    if (pos == std::string::npos || (pos > 0 && text[pos - 1] != '\n')) throw CacheError("cache has no checksum line");
    std::string stored = text.substr(pos + 9);
    while (!stored.empty() && (stored.back() == '\n' || stored.back() == '\r')) stored.pop_back();
    if (stored != hex64(fnv1a64(std::string_view(text).substr(0, pos)))) throw CacheError("cache checksum mismatch: " + path.string());

    std::istringstream lines(text.substr(0, pos));
    std::string line;
    if (!std::getline(lines, line) || line != "gillab-family") throw CacheError("not a family cache file");
    if (!std::getline(lines, line) || line != "params " + family_params(level, budget))
        throw CacheError("cache parameters do not match");
    if (!std::getline(lines, line) || line != "key " + family_cache_key(level, budget)) throw CacheError("cache key mismatch");

    CantorFamily fam = build_family(level, budget);
    const CantorGen* cur = nullptr;
    while (std::getline(lines, line)) {
        if (line.starts_with("member ")) {
            cur = &fam.at(parse_rational(line.substr(7)));
        } else if (line.starts_with("stage ")) {
            if (!cur) throw CacheError("stage line before member");
            auto sp = line.find(' ', 6);
            int d = std::stoi(line.substr(6, sp - 6));
            std::string body = sp == std::string::npos ? std::string() : line.substr(sp + 1);
            try {
                cur->preload_stage(d, IntervalSet::parse(body));
            } catch (const Error& e) {
                throw CacheError(std::string("corrupt cover in cache: ") + e.what());
            }
        } else if (line.starts_with("removal ") || line.starts_with("entry ")) {
            // schedules are recomputed on demand; kept in the file for inspection
        } else if (!line.empty()) {
            throw CacheError("unexpected cache line: " + line.substr(0, 40));
        }
    }
    return fam;
}

}  // namespace gillab
