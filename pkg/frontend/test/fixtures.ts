// Captured verbatim from the fixture-backed vidrag service
// (vidrag serve --config fixtures/config.yaml).

import { QueryResponse, ToolInfo } from "../src/types";

export const HOW_TO_RESPONSE: QueryResponse = {
  answer_type: "how_to",
  tool: "cooking",
  payload: {
    title: "How do i make pasta carbonara at home",
    steps: [
      "the residual heat cooks the sauce gently into a silky cream",
      "finished carbonara plated with cracked black pepper on top",
      "finish with plenty of freshly cracked black pepper",
      "the chef twirls a forkful of creamy carbonara toward the camera",
    ],
  },
  citations: [
    {
      video_id: "pasta-carbonara-basics",
      title: "How to Make Classic Pasta Carbonara",
      start_ms: 198000,
      end_ms: 296000,
      deep_link_url:
        "https://videos.example.com/watch?v=pasta-carbonara-basics&t=198s",
      quoted_text: "the residual heat cooks the sauce gently into a silky cream",
    },
  ],
  retrieved: [
    {
      video_id: "pasta-carbonara-basics",
      score: 0.036432,
      entry_id: "pasta-carbonara-basics#3",
    },
    {
      video_id: "tonkotsu-ramen-home",
      score: -0.037248,
      entry_id: "tonkotsu-ramen-home#1",
    },
  ],
};

export const PLACE_RESPONSE: QueryResponse = {
  answer_type: "place",
  tool: "travel",
  payload: {
    name: "Paris in a Day: Walking Tour of the City of Light",
    description:
      "aerial view of paris rooftops with the eiffel tower on the horizon at sunrise",
    why_notable:
      "paris the city of light packs two thousand years of history into a morning walk",
  },
  citations: [
    {
      video_id: "paris-walking-tour",
      title: "Paris in a Day: Walking Tour of the City of Light",
      start_ms: 0,
      end_ms: 140000,
      deep_link_url:
        "https://videos.example.com/watch?v=paris-walking-tour&t=0s",
      quoted_text:
        "aerial view of paris rooftops with the eiffel tower on the horizon at sunrise",
    },
    {
      video_id: "kyoto-temple-guide",
      title: "Kyoto Travel Guide: Temples, Tea and Gardens",
      start_ms: 75000,
      end_ms: 255000,
      deep_link_url:
        "https://videos.example.com/watch?v=kyoto-temple-guide&t=75s",
      quoted_text: "a stone path through a moss garden with maple trees",
    },
  ],
  retrieved: [
    { video_id: "paris-walking-tour", score: 0.257845, entry_id: "paris-walking-tour#0" },
    { video_id: "kyoto-temple-guide", score: 0.063747, entry_id: "kyoto-temple-guide#1" },
  ],
};

export const TOOLS: ToolInfo[] = [
  {
    tool_id: "cooking",
    description: "cooking recipes and kitchen technique videos",
    video_count: 2,
  },
  {
    tool_id: "travel",
    description: "travel destinations city guides and sightseeing videos",
    video_count: 2,
  },
  {
    tool_id: "hands-on",
    description: "hands on tutorials crafts and fitness workouts",
    video_count: 2,
  },
  {
    tool_id: "knowledge",
    description: "science history and general knowledge explainers",
    video_count: 2,
  },
];

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
