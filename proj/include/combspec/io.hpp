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


#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "combspec/spectrum.hpp"

namespace combspec {

std::string sha256_hex(std::string_view data);

// %.17g, so every double round-trips through text.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
    std::string str() const;
};

// Columns m, m_delta_omega, re, im, terms.
CsvTable spike_table(const Spectrum& spectrum);
// Columns s, t, value.
CsvTable series_table(const TimeSeries& series);

// Files are kept in memory until commit(), which writes each one to a
// temporary name in the target directory and renames them into place only
// after every write succeeded. On failure nothing new is left behind.
class ArtifactBundle {
public:
    void add(const std::string& name, std::string content);
    const std::map<std::string, std::string>& files() const { return files_; }
    void commit(const std::filesystem::path& dir) const;

private:
    std::map<std::string, std::string> files_;
};

}  // namespace combspec
