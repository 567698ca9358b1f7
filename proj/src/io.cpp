// Copyright 2026 the combspec authors
//
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


#include "combspec/io.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "combspec/error.hpp"

namespace combspec {

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        fail(ErrorCode::Io, "SHA-256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[md[i] >> 4]);
        out.push_back(kHex[md[i] & 0xf]);
    }
    return out;
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

void CsvTable::add_row(std::vector<std::string> row) {
    require(row.size() == header.size(), ErrorCode::InvalidArgument, "CSV row width does not match the header");
    rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            os << (i ? "," : "") << cells[i];
        }
        os << '\n';
    };
    line(header);
    for (const auto& r : rows) {
        line(r);
    }
    return os.str();
}

CsvTable spike_table(const Spectrum& spectrum) {
    CsvTable t;
    t.header = {"m", "m_delta_omega", "re", "im", "terms"};
    for (const auto& [m, spike] : spectrum.spikes) {
        t.add_row({std::to_string(m), format_double(spectrum.frequency(m)), format_double(spike.value.real()),
                   format_double(spike.value.imag()), std::to_string(spike.term_count)});
    }
    return t;
}

CsvTable series_table(const TimeSeries& series) {
    CsvTable t;
    t.header = {"s", "t", "value"};
    for (std::size_t s = 0; s < series.samples.size(); ++s) {
        t.add_row({std::to_string(s), format_double(series.time(s)), format_double(series.samples[s])});
    }
    return t;
}

void ArtifactBundle::add(const std::string& name, std::string content) {
    require(!name.empty() && name.find('/') == std::string::npos && name[0] != '.', ErrorCode::InvalidArgument,
            "artifact names must be plain file names: '" + name + "'");
    files_[name] = std::move(content);
}

void ArtifactBundle::commit(const std::filesystem::path& dir) const {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        fail(ErrorCode::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
    }
    const std::string suffix = ".partial-" + std::to_string(::getpid());
    std::vector<std::pair<fs::path, fs::path>> staged;
    auto cleanup = [&] {
        for (const auto& [tmp, final_path] : staged) {
            std::error_code ignore;
            fs::remove(tmp, ignore);
        }
    };
    for (const auto& [name, content] : files_) {
        const fs::path final_path = dir / name;
        const fs::path tmp = dir / (name + suffix);
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (out) {
            staged.emplace_back(tmp, final_path);
            out.write(content.data(), static_cast<std::streamsize>(content.size()));
            out.close();
        }
        if (!out) {
            cleanup();
            fail(ErrorCode::Io, "cannot write " + final_path.string());
        }
    }
    // rename would fail midway on a directory in the way; catch it first
    for (const auto& [tmp, final_path] : staged) {
        if (fs::is_directory(final_path, ec)) {
            cleanup();
            fail(ErrorCode::Io, "cannot replace directory " + final_path.string() + " with an artifact");
        }
    }
    for (const auto& [tmp, final_path] : staged) {
        fs::rename(tmp, final_path, ec);
        if (ec) {
            cleanup();
            fail(ErrorCode::Io, "cannot move " + tmp.string() + " into place: " + ec.message());
        }
    }
}

}  // namespace combspec
