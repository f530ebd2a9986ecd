#include "trackaudit/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>

#include "trackaudit/app.hpp"
#include "trackaudit/config.hpp"
#include "trackaudit/csv.hpp"
#include "trackaudit/domain.hpp"
#include "trackaudit/email.hpp"
#include "trackaudit/fetch.hpp"
#include "trackaudit/parallel.hpp"
#include "trackaudit/report.hpp"
#include "trackaudit/strings.hpp"
#include "trackaudit/tracker_db.hpp"
#include "trackaudit/web.hpp"

namespace trackaudit::cli {

namespace fs = std::filesystem;

namespace {

struct FatalError {
  std::string message;
};

[[noreturn]] void fail(std::string message) { throw FatalError{std::move(message)}; }

PublicSuffixList require_psl(const std::optional<fs::path>& path) {
  if (!path) fail("no public suffix list configured (use --psl or the config file)");
  auto psl = PublicSuffixList::load(*path);
  if (!psl.ok()) fail(psl.error());
  return std::move(psl.value());
}

Allowlist load_allowlist(const std::optional<fs::path>& path, const PublicSuffixList& psl) {
  if (!path) return Allowlist{};  // built-in default: w3.org
  auto allow = Allowlist::load(*path, psl);
  if (!allow.ok()) fail(allow.error());
  return std::move(allow.value());
}

trackerdb::EntityMap require_entity_map(const std::optional<fs::path>& path) {
  if (!path) fail("no entity map configured (use --entity-map or the config file)");
  auto map = trackerdb::EntityMap::load(*path);
  if (!map.ok()) fail(map.error().detail);
  return std::move(map.value());
}

std::vector<fs::path> sorted_files(const fs::path& dir, std::string_view extension) {
  if (!fs::is_directory(dir)) fail("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (name.size() >= extension.size() &&
        strings::iequals(name.substr(name.size() - extension.size()), extension)) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string read_file_or_fail(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail("cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& file, std::string_view content) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail("cannot write " + file.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string site_slug(std::string_view site) {
  std::string slug;
  for (char c : site) {
    char lc = strings::ascii_lower(c);
    if ((lc >= 'a' && lc <= 'z') || (lc >= '0' && lc <= '9') || lc == '.' || lc == '-') {
      slug.push_back(lc);
    } else if (!slug.empty() && slug.back() != '_') {
      slug.push_back('_');
    }
  }
  while (!slug.empty() && slug.back() == '_') slug.pop_back();
  size_t start = 0;
  while (start < slug.size() && slug[start] == '_') ++start;
  slug.erase(0, start);
  return slug.empty() ? "site" : slug;
}

std::vector<std::string> read_site_list(const fs::path& file) {
  std::string text = read_file_or_fail(file);
  std::vector<std::string> sites;
  for (auto line : strings::split(text, '\n')) {
    auto entry = strings::trim(line);
    if (entry.empty() || entry.starts_with("#")) continue;
    sites.emplace_back(entry);
  }
  return sites;
}

// ---- email ---------------------------------------------------------------

struct EmailArgs {
  fs::path in_dir;
  fs::path out_file;
  bool debug_hosts = false;
};

int cmd_email(const EmailArgs& args, const config::RunConfig& cfg) {
  PublicSuffixList psl = require_psl(cfg.psl);
  Allowlist allow = load_allowlist(cfg.allowlist, psl);

  std::vector<fs::path> files = sorted_files(args.in_dir, ".eml");
  std::string jsonl;
  std::vector<std::pair<email::EmailAuditRecord, std::string>> labeled;
  int failures = 0;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      std::cerr << "email " << file.filename().string() << ": unreadable, skipped\n";
      ++failures;
      continue;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string raw = buf.str();
    email::AuditOptions options;
    options.debug_hosts = args.debug_hosts;
    auto record = email::audit_email(raw, allow, psl, options);
    std::string source = file.stem().string();
    if (!record.ok()) {
      std::cerr << "email " << file.filename().string() << ": " << record.error().message << "\n";
      ++failures;
      continue;
    }
    jsonl += email::record_to_json(record.value(), source).dump();
    jsonl.push_back('\n');
    labeled.emplace_back(std::move(record.value()), std::move(source));
  }

  write_file(args.out_file, jsonl);
  fs::path actors_file = args.out_file;
  actors_file.replace_extension();
  actors_file += ".actors.csv";
  write_file(actors_file, email::actor_table_csv(email::actor_table(labeled)));

  std::cout << labeled.size() << " message(s) audited, " << failures << " failed\n";
  return failures == 0 ? kExitOk : kExitPartialFailure;
}

// ---- web -----------------------------------------------------------------

struct WebArgs {
  fs::path sites_file;
  bool fetch_mode = false;
  std::optional<fs::path> ingest_dir;
  fs::path out_dir;
};

std::string raw_cookie_csv(const std::vector<web::CaptureSession>& sessions) {
  std::string out = "site,name,domain,value_hash,expires,party,phase\n";
  for (const auto& session : sessions) {
    for (const auto& cookie : session.cookies) {
      out += csv::join_row({session.site, cookie.name, cookie.cookie_domain, cookie.value_hash,
                            cookie.expires_epoch ? std::to_string(*cookie.expires_epoch) : "",
                            std::string(web::to_string(cookie.party)),
                            std::string(web::to_string(session.phase))});
      out.push_back('\n');
    }
  }
  return out;
}

int cmd_web(const WebArgs& args, const config::RunConfig& cfg) {
  PublicSuffixList psl = require_psl(cfg.psl);
  std::vector<std::string> sites = read_site_list(args.sites_file);
  if (sites.empty()) fail("site list is empty: " + args.sites_file.string());

  std::vector<web::CaptureSession> ingested;
  int capture_failures = 0;
  if (!args.fetch_mode) {
    for (const auto& file : sorted_files(*args.ingest_dir, ".capture.json")) {
      auto session = web::load_capture_file(file, psl);
      if (!session.ok()) {
        std::cerr << "capture " << session.error() << "\n";
        ++capture_failures;
        continue;
      }
      ingested.push_back(std::move(session.value()));
    }
  }

  struct SiteOutcome {
    std::vector<web::CaptureSession> sessions;
    std::optional<web::SiteSummary> summary;
    std::string error;
  };
  std::vector<SiteOutcome> outcomes(sites.size());
  std::mutex cerr_mutex;

  fetch::FetchOptions fetch_options;
  fetch_options.redirect_limit = cfg.redirect_limit;
  fetch_options.timeout = std::chrono::seconds(cfg.timeout_seconds);

  auto handle_site = [&](size_t i) {
    const std::string& site = sites[i];
    SiteOutcome& outcome = outcomes[i];
    if (args.fetch_mode) {
      auto fetched = fetch::static_fetch(site, psl, fetch_options);
      if (!fetched.ok()) {
        outcome.error = std::string(fetch::to_string(fetched.error().kind)) + ": " +
                        fetched.error().message;
        std::lock_guard<std::mutex> lock(cerr_mutex);
        std::cerr << "site " << site << ": " << outcome.error << "\n";
        return;
      }
      outcome.sessions.push_back(std::move(fetched.value()));
    } else {
      auto site_url = parse_url(site);
      std::string site_key = site;
      if (site_url.ok()) {
        auto dom = registrable_domain(site_url.value().host, psl);
        if (dom.ok()) site_key = dom.value().domain.value;
      } else if (auto dom = registrable_domain(site, psl); dom.ok()) {
        site_key = dom.value().domain.value;
      }
      for (const auto& session : ingested) {
        if (session.site == site || session.site_domain.value == site_key) {
          outcome.sessions.push_back(session);
        }
      }
      if (outcome.sessions.empty()) {
        outcome.error = "no capture for site";
        std::lock_guard<std::mutex> lock(cerr_mutex);
        std::cerr << "site " << site << ": no capture file found\n";
        return;
      }
    }

    const web::CaptureSession* pre = nullptr;
    const web::CaptureSession* post = nullptr;
    for (const auto& session : outcome.sessions) {
      if (session.phase == web::Phase::PreConsent && pre == nullptr) pre = &session;
      if (session.phase == web::Phase::PostConsent && post == nullptr) post = &session;
    }
    if (pre == nullptr) {
      outcome.error = "no pre-consent session";
      return;
    }
    auto summary = web::site_report(*pre, post, psl);
    if (!summary.ok()) {
      outcome.error = summary.error().message;
      return;
    }
    outcome.summary = std::move(summary.value());
  };

  // Per-site isolation: each site's state lives in its own slot, the shared
  // PSL/config stay read-only, aggregation below is single-threaded.
  parallel_for(sites.size(), cfg.parallel, handle_site);

  std::vector<web::CaptureSession> all_sessions;
  std::vector<web::SiteSummary> summaries;
  std::string errors_csv = "site,error\n";
  int failures = capture_failures;
  for (size_t i = 0; i < sites.size(); ++i) {
    auto& outcome = outcomes[i];
    if (!outcome.error.empty()) {
      ++failures;
      errors_csv += csv::join_row({sites[i], outcome.error});
      errors_csv.push_back('\n');
      continue;
    }
    for (auto& session : outcome.sessions) {
      std::string suffix = session.phase == web::Phase::PostConsent ? ".post" : ".pre";
      write_file(args.out_dir / (site_slug(sites[i]) + suffix + ".session.json"),
                 web::session_to_json(session).dump(2) + "\n");
      all_sessions.push_back(std::move(session));
    }
    if (outcome.summary) summaries.push_back(std::move(*outcome.summary));
  }

  write_file(args.out_dir / "cookies_raw.csv", raw_cookie_csv(all_sessions));
  write_file(args.out_dir / "summary.csv",
             report::export_table(report::site_summary_table(summaries), report::Format::Csv));
  write_file(args.out_dir / "errors.csv", errors_csv);

  std::cout << summaries.size() << " site(s) audited, " << failures << " failed\n";
  return failures == 0 ? kExitOk : kExitPartialFailure;
}

// ---- apk scan ------------------------------------------------------------

struct ApkScanArgs {
  fs::path dumps_dir;
  fs::path out_file;
  int max_permissions = 10;
  int max_trackers = 5;
};

int cmd_apk_scan(const ApkScanArgs& args, const config::RunConfig& cfg) {
  if (!cfg.signatures) fail("no signature file configured (use --sigs or the config file)");
  auto sigs = trackerdb::load_signatures(*cfg.signatures);
  if (!sigs.ok()) fail(sigs.error().detail);

  std::set<std::string> intrusive = app::default_intrusive_permissions();
  if (cfg.intrusive) {
    auto loaded = app::load_permission_list(*cfg.intrusive);
    if (!loaded.ok()) fail(loaded.error());
    intrusive = std::move(loaded.value());
  }

  std::vector<fs::path> files = sorted_files(args.dumps_dir, ".json");
  struct ScanOutcome {
    std::optional<app::AppRecord> record;
    std::string error;
  };
  std::vector<ScanOutcome> outcomes(files.size());

  parallel_for(files.size(), cfg.parallel, [&](size_t i) {
    auto dump = app::load_app_dump(files[i]);
    if (!dump.ok()) {
      outcomes[i].error = dump.error();
      return;
    }
    app::AppRecord record = std::move(dump.value().record);
    record.trackers = app::scan_classes(dump.value().classes, sigs.value());
    outcomes[i].record = std::move(record);
  });

  std::string jsonl;
  int failures = 0;
  std::vector<app::AppRecord> records;
  for (size_t i = 0; i < files.size(); ++i) {
    if (!outcomes[i].error.empty()) {
      std::cerr << "dump " << files[i].filename().string() << ": " << outcomes[i].error << "\n";
      ++failures;
      continue;
    }
    auto j = app::record_to_json(*outcomes[i].record);
    j["flagged"] = app::red_flag(*outcomes[i].record, args.max_permissions, args.max_trackers);
    jsonl += j.dump();
    jsonl.push_back('\n');
    records.push_back(std::move(*outcomes[i].record));
  }
  write_file(args.out_file, jsonl);

  if (!records.empty()) {
    auto summary = app::permission_summary(records, intrusive);
    if (summary.ok()) {
      std::cout << "mean permissions: "
                << strings::format_double2(summary.value().mean_permissions)
                << ", mean trackers: " << strings::format_double2(summary.value().mean_trackers)
                << "\n";
    }
  }
  std::cout << records.size() << " app(s) scanned, " << failures << " failed\n";
  return failures == 0 ? kExitOk : kExitPartialFailure;
}

// ---- label ---------------------------------------------------------------

struct LabelArgs {
  fs::path apps_file;
  fs::path log_file;
  std::optional<fs::path> out_file;
};

int cmd_label(const LabelArgs& args) {
  auto apps = app::load_app_list(args.apps_file);
  if (!apps.ok()) fail(apps.error());

  // Interactive labeling is strictly sequential; no parallelism here.
  auto outcome = app::label_interactively(std::move(apps.value()), std::cin, std::cout,
                                          args.log_file);
  std::cout << "\n" << outcome.prompted << " app(s) labeled, " << outcome.resumed
            << " resumed from log\n";

  if (args.out_file) {
    std::string jsonl;
    for (const auto& record : outcome.apps) {
      jsonl += app::record_to_json(record).dump();
      jsonl.push_back('\n');
    }
    write_file(*args.out_file, jsonl);
  }
  return kExitOk;
}

// ---- report --------------------------------------------------------------

struct ReportArgs {
  fs::path from_dir;
  std::optional<fs::path> out_dir;
  std::string format = "csv";
  size_t top_n = 10;
};

int cmd_report(const ReportArgs& args, const config::RunConfig& cfg) {
  auto format = report::parse_format(args.format);
  if (!format.ok()) fail(format.error());
  PublicSuffixList psl = require_psl(cfg.psl);
  trackerdb::EntityMap entities;  // default: everything falls into Autres
  if (cfg.entity_map) entities = require_entity_map(cfg.entity_map);
  std::optional<trackerdb::DomainBlocklist> blocklist;
  if (cfg.blocklist) {
    auto loaded = trackerdb::DomainBlocklist::load(*cfg.blocklist, psl);
    if (!loaded.ok()) fail(loaded.error().detail);
    blocklist = std::move(loaded.value());
  }

  if (!fs::is_directory(args.from_dir)) fail("not a directory: " + args.from_dir.string());
  fs::path out_dir = args.out_dir.value_or(args.from_dir);

  std::vector<web::CaptureSession> sessions;
  std::vector<std::pair<email::EmailAuditRecord, std::string>> email_records;
  std::vector<app::AppRecord> app_records;

  std::vector<fs::path> entries;
  for (const auto& entry : fs::directory_iterator(args.from_dir)) {
    if (entry.is_regular_file()) entries.push_back(entry.path());
  }
  std::sort(entries.begin(), entries.end());

  int failures = 0;
  for (const auto& path : entries) {
    std::string name = path.filename().string();
    auto ends_with = [&](std::string_view suffix) {
      return name.size() >= suffix.size() &&
             name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends_with(".session.json")) {
      auto session = web::load_session_file(path, psl);
      if (!session.ok()) {
        std::cerr << session.error() << "\n";
        ++failures;
        continue;
      }
      sessions.push_back(std::move(session.value()));
    } else if (ends_with(".capture.json")) {
      auto session = web::load_capture_file(path, psl);
      if (!session.ok()) {
        std::cerr << session.error() << "\n";
        ++failures;
        continue;
      }
      sessions.push_back(std::move(session.value()));
    } else if (ends_with(".emails.jsonl")) {
      std::istringstream in(read_file_or_fail(path));
      std::string line;
      while (std::getline(in, line)) {
        if (strings::trim(line).empty()) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
          ++failures;
          continue;
        }
        auto record = email::record_from_json(j);
        if (!record.ok()) {
          ++failures;
          continue;
        }
        email_records.emplace_back(std::move(record.value()), j.value("source", "unknown"));
      }
    } else if (ends_with(".apps.jsonl")) {
      std::istringstream in(read_file_or_fail(path));
      std::string line;
      while (std::getline(in, line)) {
        if (strings::trim(line).empty()) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
          ++failures;
          continue;
        }
        auto record = app::record_from_json(j);
        if (!record.ok()) {
          ++failures;
          continue;
        }
        app_records.push_back(std::move(record.value()));
      }
    }
  }

  auto extension = [&] {
    switch (format.value()) {
      case report::Format::Csv: return ".csv";
      case report::Format::Jsonl: return ".jsonl";
      case report::Format::Markdown: return ".md";
    }
    return ".csv";
  }();
  auto emit = [&](const report::Table& table) {
    write_file(out_dir / (table.name + extension),
               report::export_table(table, format.value()));
  };

  bool wrote_anything = false;
  if (!sessions.empty()) {
    // Group sessions by site to build per-site summaries.
    std::map<std::string, std::vector<const web::CaptureSession*>> by_site;
    for (const auto& session : sessions) by_site[session.site].push_back(&session);
    std::vector<web::SiteSummary> summaries;
    for (const auto& [site, group] : by_site) {
      const web::CaptureSession* pre = nullptr;
      const web::CaptureSession* post = nullptr;
      for (const auto* s : group) {
        if (s->phase == web::Phase::PreConsent && pre == nullptr) pre = s;
        if (s->phase == web::Phase::PostConsent && post == nullptr) post = s;
      }
      if (pre == nullptr) {
        std::cerr << "site " << site << ": no pre-consent session\n";
        ++failures;
        continue;
      }
      auto summary = web::site_report(*pre, post, psl);
      if (!summary.ok()) {
        std::cerr << "site " << site << ": " << summary.error().message << "\n";
        ++failures;
        continue;
      }
      summaries.push_back(std::move(summary.value()));
    }
    auto top = report::top_sites_by_third_cookies(summaries, args.top_n);
    emit(report::top_sites_table(top));
    auto tallies = report::domain_tallies(sessions, psl);
    emit(report::domain_tally_table(tallies, blocklist ? &*blocklist : nullptr));
    wrote_anything = true;
  }
  if (!email_records.empty()) {
    auto actors = email::actor_table(email_records);
    emit(report::actor_table_to_table(actors));
    auto rollup = report::entity_rollup(actors, entities);
    emit(report::entity_actor_table(rollup));
    wrote_anything = true;
  }
  if (!app_records.empty()) {
    auto shares = app::tracker_identity_table(app_records, entities);
    if (shares.ok()) {
      emit(report::entity_share_table(shares.value()));
      wrote_anything = true;
    }
  }

  if (!wrote_anything) {
    std::cerr << "nothing to report in " << args.from_dir.string() << "\n";
  }
  return failures == 0 ? kExitOk : kExitPartialFailure;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App cli{"tracker audit toolkit: emails, websites, app packages"};
  cli.require_subcommand(1);

  auto env_config = config::load_env_config();
  if (!env_config.ok()) {
    std::cerr << "error: " << env_config.error() << "\n";
    return kExitConfigError;
  }
  config::RunConfig cfg = env_config.value();

  // Shared path options; each subcommand registers the ones it honors.
  auto add_psl = [&](CLI::App* cmd) {
    auto* opt = cmd->add_option_function<std::string>(
        "--psl", [&](const std::string& v) { cfg.psl = v; },
        "public suffix list file");
    return opt;
  };
  auto add_allowlist = [&](CLI::App* cmd) {
    cmd->add_option_function<std::string>(
        "--allowlist", [&](const std::string& v) { cfg.allowlist = v; },
        "allowlist file (one registrable domain per line)");
  };
  auto add_entity_map = [&](CLI::App* cmd) {
    cmd->add_option_function<std::string>(
        "--entity-map", [&](const std::string& v) { cfg.entity_map = v; },
        "entity map CSV (pattern,entity)");
  };

  EmailArgs email_args;
  auto* email_cmd = cli.add_subcommand("email", "audit a directory of .eml files");
  email_cmd->add_option("--in", email_args.in_dir, "directory of raw messages")->required();
  email_cmd->add_option("--out", email_args.out_file, "output JSONL file")->required();
  email_cmd->add_flag("--debug-hosts", email_args.debug_hosts,
                      "retain full hostnames in records (off by default)");
  add_psl(email_cmd);
  add_allowlist(email_cmd);

  WebArgs web_args;
  auto* web_cmd = cli.add_subcommand("web", "audit capture sessions or fetch site pages");
  web_cmd->add_option("--sites", web_args.sites_file, "site list, one URL per line")->required();
  auto* fetch_flag = web_cmd->add_flag("--fetch", web_args.fetch_mode,
                                       "fetch each site statically (header cookies only)");
  std::string ingest_dir;
  auto* ingest_opt =
      web_cmd->add_option("--ingest", ingest_dir, "directory of *.capture.json files");
  fetch_flag->excludes(ingest_opt);
  web_cmd->add_option("--out", web_args.out_dir, "output directory")->required();
  web_cmd->add_option("--parallel", cfg.parallel, "worker threads across sites");
  web_cmd->add_option("--timeout", cfg.timeout_seconds, "per-request timeout, seconds");
  web_cmd->add_option("--redirect-limit", cfg.redirect_limit, "max redirects to follow");
  add_psl(web_cmd);

  auto* apk_cmd = cli.add_subcommand("apk", "app package analysis");
  apk_cmd->require_subcommand(1);
  ApkScanArgs apk_args;
  auto* scan_cmd = apk_cmd->add_subcommand("scan", "scan app dumps against tracker signatures");
  scan_cmd->add_option("--dumps", apk_args.dumps_dir, "directory of app dump JSON files")
      ->required();
  scan_cmd->add_option_function<std::string>(
      "--sigs", [&](const std::string& v) { cfg.signatures = v; }, "tracker signature JSON");
  scan_cmd->add_option("--out", apk_args.out_file, "output JSONL file")->required();
  scan_cmd->add_option_function<std::string>(
      "--intrusive", [&](const std::string& v) { cfg.intrusive = v; },
      "intrusive permission list file");
  scan_cmd->add_option("--max-permissions", apk_args.max_permissions,
                       "red-flag threshold: permission count");
  scan_cmd->add_option("--max-trackers", apk_args.max_trackers,
                       "red-flag threshold: tracker count");
  scan_cmd->add_option("--parallel", cfg.parallel, "worker threads across dumps");

  LabelArgs label_args;
  auto* label_cmd = cli.add_subcommand("label", "interactive public-service labeling (y/n/t)");
  label_cmd->add_option("--apps", label_args.apps_file, "app metadata JSON array")->required();
  label_cmd->add_option("--log", label_args.log_file, "append-only answer log CSV")->required();
  std::string label_out;
  auto* label_out_opt = label_cmd->add_option("--out", label_out, "labeled records JSONL");

  ReportArgs report_args;
  auto* report_cmd = cli.add_subcommand("report", "aggregate audit outputs into tables");
  report_cmd->add_option("--from", report_args.from_dir, "directory of audit outputs")
      ->required();
  std::string report_out;
  auto* report_out_opt = report_cmd->add_option("--out", report_out, "output directory");
  report_cmd->add_option("--format", report_args.format, "csv|jsonl|md")
      ->default_val("csv");
  report_cmd->add_option("--top", report_args.top_n, "top-N sites to rank")->default_val(10);
  add_psl(report_cmd);
  add_entity_map(report_cmd);
  report_cmd->add_option_function<std::string>(
      "--blocklist", [&](const std::string& v) { cfg.blocklist = v; },
      "known-tracker blocklist (domain[,category] lines)");

  std::vector<std::string> argv_copy(args);
  try {
    std::vector<const char*> argv;
    argv.push_back("trackaudit");
    for (const auto& a : argv_copy) argv.push_back(a.c_str());
    cli.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return cli.exit(e) == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (email_cmd->parsed()) return cmd_email(email_args, cfg);
    if (web_cmd->parsed()) {
      if (!web_args.fetch_mode && ingest_opt->count() == 0) {
        fail("web needs --fetch or --ingest DIR");
      }
      if (ingest_opt->count() > 0) web_args.ingest_dir = ingest_dir;
      return cmd_web(web_args, cfg);
    }
    if (scan_cmd->parsed()) return cmd_apk_scan(apk_args, cfg);
    if (label_cmd->parsed()) {
      if (label_out_opt->count() > 0) label_args.out_file = label_out;
      return cmd_label(label_args);
    }
    if (report_cmd->parsed()) {
      if (report_out_opt->count() > 0) report_args.out_dir = report_out;
      return cmd_report(report_args, cfg);
    }
  } catch (const FatalError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}

}  // namespace trackaudit::cli
