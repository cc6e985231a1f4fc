/** Wire types for the analysis service HTTP API. */

export interface Box {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export interface PromptPoint {
  x: number;
  y: number;
  label: 0 | 1;
}

export interface SkeletonNode {
  x: number;
  y: number;
  kind: "end" | "branch";
}

export interface SkeletonSegment {
  id: number;
  points: [number, number][];
}

export interface SkeletonJson {
  nodes: SkeletonNode[];
  segments: SkeletonSegment[];
}

export interface Finding {
  segment: number;
  x: number;
  y: number;
  index: number;
  kind: "stenosis" | "aneurysm";
  change_p: number;
  reference_radius_px: number;
}

export interface ThicknessProfileJson {
  segment: number;
  values: number[];
}

export interface PerBoxEntry {
  box: Box;
  points: PromptPoint[];
  mask_path: string;
}

export interface AnalysisDocument {
  image: string;
  per_box: PerBoxEntry[];
  skeleton: SkeletonJson;
  thickness_profiles: ThicknessProfileJson[];
  findings: Finding[];
}

export interface UploadResponse {
  imageId: string;
  width: number;
  height: number;
}

export interface AnalyzeResponse {
  sessionId: string;
  status: string;
}

export type SessionStatus = "pending" | "done" | "failed";

export interface SessionPayload {
  sessionId: string;
  status: SessionStatus;
  document?: AnalysisDocument;
  /** artifact path -> base64 PNG bytes */
  artifacts?: Record<string, string>;
  error?: string;
  detail?: string;
}

/** The only two knobs the review UI exposes. */
export interface ConfigOverrides {
  minChangeThreshold?: number;
  probabilityThreshold?: number;
}
