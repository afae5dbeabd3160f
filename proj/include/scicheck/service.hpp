#pragma once

#include "scicheck/workspace.hpp"

#include <map>
#include <string>

namespace httplib {
class Server;
}

namespace scicheck {

// Builds a filter from search parameters (title_contains, topic, publisher,
// published_after, published_before, min_duration_seconds,
// max_duration_seconds, language, media_kind). Unknown names and malformed
// values throw ValidationError.
MediaFilter media_filter_from_params(const std::multimap<std::string, std::string>& params);

// {"items": [MediaItem...], "total": n}
nlohmann::json search_response(const std::vector<MediaItem>& items);

// Registers the REST API on `server`.
//   POST /ground-truth?format=nt|csv[&source=id][&dry_run=true]
//   POST /media                      JSON or multipart (metadata + file)
//   GET  /jobs/{id}
//   GET  /media/{id}, /media/{id}/report
//   GET  /statements?media_id=&status=&page=&page_size=
//   GET  /statements/{id}
//   POST /statements/{id}/review
//   GET  /search?<filter>
//   GET  /graph/stats
//   POST /lexicon/reload
//   GET  /healthz
void mount_api(httplib::Server& server, Workspace& workspace);

// Blocks serving on the configured host and port until stop_service() or a
// SIGINT/SIGTERM. Returns false if the port cannot be bound.
bool run_service(Workspace& workspace);
void stop_service();

}  // namespace scicheck
