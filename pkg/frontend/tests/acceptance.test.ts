// Criterion 9: the UI color invariant, favorites exactness, and the sync
// report display, driven by a scripted server fixture.

import { afterAll, describe, expect, it } from 'vitest'

import { ApiClient } from '../src/api.js'
import { App } from '../src/app.js'
import { view } from '../src/view.js'
import { FakeServer } from './fake_server.js'

let failed = false

afterAll(() => {
  console.log(`criterion 9 (UI color invariant): ${failed ? 'FAIL' : 'PASS'}`)
})

function guard<T>(fn: () => T): T {
  try {
    return fn()
  } catch (e) {
    failed = true
    throw e
  }
}

describe('criterion 9', () => {
  it('green exactly when the response bought flag is true, across random toggles', async () => {
    const server = new FakeServer()
    const entries = []
    for (let i = 0; i < 8; i++) {
      entries.push(server.seedListEntry(server.seedProduct(`p${i}`, '1', false), i % 3 === 0))
    }
    const app = new App(new ApiClient('', server.fetch))
    await app.refreshAll()
    for (let step = 0; step < 200; step++) {
      const target = entries[Math.floor(Math.random() * entries.length)]!
      await app.toggleItem(target.id)
      const rows = view(app.state).listRows
      guard(() => {
        for (const row of rows) {
          const serverEntry = server.list.find((e) => e.id === row.id)!
          expect(row.bought).toBe(serverEntry.bought)
          expect(row.color).toBe(serverEntry.bought ? 'green' : 'red')
        }
      })
    }
  })

  it('favorites filter shows exactly the flagged products', async () => {
    const server = new FakeServer()
    for (let i = 0; i < 20; i++) server.seedProduct(`p${i}`, '1', Math.random() < 0.5)
    const app = new App(new ApiClient('', server.fetch))
    await app.refreshAll()
    app.setFavoritesOnly(true)
    guard(() => {
      const shown = view(app.state).productRows.map((r) => r.name)
      const flagged = server.products.filter((p) => p.is_favorite).map((p) => p.name)
      expect(shown).toEqual(flagged)
    })
  })

  it('sync button surfaces merge report counts from the fixture', async () => {
    const server = new FakeServer()
    server.syncReport = {
      applied_local: 4,
      applied_remote: 2,
      conflicts: [
        { table: 'Products', pk: 1, winner_replica: 'aa', policy: 'latest' },
        { table: 'List', pk: 7, winner_replica: 'bb', policy: 'latest' },
      ],
    }
    const app = new App(new ApiClient('', server.fetch))
    app.setRemoteUrl('http://remote:8400')
    await app.runSync()
    guard(() => expect(view(app.state).syncButton).toBe('6 applied, 2 conflicts'))
  })
})
