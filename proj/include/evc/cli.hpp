#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace evc {

enum ExitCode : int { kExitOk = 0, kExitDefenseFailed = 1, kExitUsage = 2 };

enum class TableFormat { Markdown, Csv };

std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                         TableFormat format);

/// Message-size table for m5-m16 (computed encodings next to the reference figures).
std::string sizes_table(TableFormat format);

/// Entry point for the evcharge tool. Subcommands: simulate, bench, sizes, attack-suite.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evc
