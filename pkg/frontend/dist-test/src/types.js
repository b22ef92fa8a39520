// Wire types for the explorer service (see the package README for the API).
export {};
